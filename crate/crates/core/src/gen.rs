//! Seeded generators of small random instances.

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::finset::{compose_fn, pullback, FinFn, FinSet};
use crate::poly::{CartesianMorphism, Polynomial, SubdividedComposite};
use crate::slices::{SliceMor, SliceObj};
use crate::symbolic::{Assignment, Monomial, SymPoly};

pub type Rng = ChaCha8Rng;

/// A generator for one case of one law, independent of every other case.
pub fn case_rng(seed: u64, law: &str, case: usize) -> Rng {
    // FNV-1a over the law name, then mixed with the seed and case index.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in law.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    let mixed = h ^ seed.rotate_left(17) ^ (case as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    Rng::seed_from_u64(mixed)
}

/// A numbered set with `lo..=hi` elements.
pub fn set_between(rng: &mut Rng, prefix: &str, lo: usize, hi: usize) -> FinSet {
    FinSet::numbered(prefix, rng.gen_range(lo..=hi.max(lo)))
}

/// A numbered set with at most `max` elements.
pub fn set(rng: &mut Rng, prefix: &str, max: usize) -> FinSet {
    set_between(rng, prefix, 0, max)
}

/// A uniform function; `cod` must be nonempty unless `dom` is empty.
pub fn func(rng: &mut Rng, dom: &FinSet, cod: &FinSet) -> FinFn {
    assert!(dom.is_empty() || !cod.is_empty(), "no functions into the empty set");
    let images = (0..dom.len()).map(|_| rng.gen_range(0..cod.len())).collect();
    FinFn::from_indices(dom.clone(), cod.clone(), images).expect("indices in range")
}

/// A uniform bijection from a fresh numbered set onto `cod`.
pub fn bijection_onto(rng: &mut Rng, prefix: &str, cod: &FinSet) -> FinFn {
    let mut images: Vec<usize> = (0..cod.len()).collect();
    images.shuffle(rng);
    FinFn::from_indices(FinSet::numbered(prefix, cod.len()), cod.clone(), images).expect("permutation")
}

/// A function into `cod` from a fresh set of at most `max` elements.
pub fn func_into(rng: &mut Rng, prefix: &str, cod: &FinSet, max: usize) -> FinFn {
    let dom = if cod.is_empty() { FinSet::empty() } else { set(rng, prefix, max) };
    func(rng, &dom, cod)
}

/// A random slice over `base` with carrier of at most `max` elements.
pub fn slice(rng: &mut Rng, base: &FinSet, max: usize) -> SliceObj {
    SliceObj::new(func_into(rng, "c", base, max))
}

/// A random slice morphism between given slices, if any exists.
pub fn slice_mor(rng: &mut Rng, src: &SliceObj, tgt: &SliceObj) -> Option<SliceMor> {
    let fibers = tgt.arrow.fibers();
    let mut images = Vec::with_capacity(src.carrier().len());
    for &b in src.arrow.images() {
        let fib = &fibers[b];
        if fib.is_empty() {
            return None;
        }
        images.push(fib[rng.gen_range(0..fib.len())]);
    }
    let m = FinFn::from_indices(src.carrier().clone(), tgt.carrier().clone(), images).ok()?;
    SliceMor::new(src.clone(), tgt.clone(), m).ok()
}

/// A random target slice together with a morphism into it from `src`.
pub fn slice_mor_from(rng: &mut Rng, src: &SliceObj, max: usize) -> SliceMor {
    let base = src.base();
    let needed = src.fiber_sizes();
    let mut images = Vec::new();
    for (b, &k) in needed.iter().enumerate() {
        let lo = usize::from(k > 0);
        for _ in 0..rng.gen_range(lo..=max.max(lo)) {
            images.push(b);
        }
    }
    let carrier = FinSet::numbered("d", images.len());
    let tgt = SliceObj::new(FinFn::from_indices(carrier, base.clone(), images).expect("indices in range"));
    slice_mor(rng, src, &tgt).expect("every needed fiber is inhabited")
}

/// A random polynomial from `x` to `y` with middle sets of at most `max`
/// elements.
pub fn poly(rng: &mut Rng, x: &FinSet, y: &FinSet, max: usize) -> Polynomial {
    let b = if y.is_empty() { FinSet::empty() } else { set(rng, "b", max) };
    let a = if b.is_empty() || x.is_empty() { FinSet::empty() } else { set(rng, "a", max) };
    Polynomial { p1: func(rng, &a, x), p2: func(rng, &a, &b), p3: func(rng, &b, y) }
}

/// A random span from `x` to `y`.
pub fn span(rng: &mut Rng, x: &FinSet, y: &FinSet, max: usize) -> Polynomial {
    let a = if x.is_empty() || y.is_empty() { FinSet::empty() } else { set(rng, "s", max) };
    Polynomial { p1: func(rng, &a, x), p2: FinFn::identity(&a), p3: func(rng, &a, y) }
}

/// A composable chain of `len` polynomials through random objects.
pub fn chain(rng: &mut Rng, len: usize, max: usize) -> (FinSet, Vec<Polynomial>) {
    let objs: Vec<FinSet> = (0..=len).map(|i| set_between(rng, &format!("o{i}_"), 1, max)).collect();
    let seq = (0..len).map(|i| poly(rng, &objs[i], &objs[i + 1], max)).collect();
    (objs[0].clone(), seq)
}

/// A cartesian morphism into `q` from a polynomial built by pulling `q2`
/// back along a random map into `B`.
pub fn cartesian_into(rng: &mut Rng, q: &Polynomial, max: usize) -> CartesianMorphism {
    let f1 = func_into(rng, "e", q.mid_tgt(), max);
    cartesian_along(q, f1)
}

/// As [`cartesian_into`] but with bijective components.
pub fn iso_into(rng: &mut Rng, q: &Polynomial) -> CartesianMorphism {
    let f1 = bijection_onto(rng, "e", q.mid_tgt());
    cartesian_along(q, f1)
}

fn cartesian_along(q: &Polynomial, f1: FinFn) -> CartesianMorphism {
    let sq = pullback(&q.p2, &f1).expect("cospan");
    let p = Polynomial {
        p1: compose_fn(&q.p1, &sq.proj1).expect("composable"),
        p2: sq.proj2.clone(),
        p3: compose_fn(&q.p3, &f1).expect("composable"),
    };
    CartesianMorphism::new(p, q.clone(), sq.proj1, f1).expect("pullbacks are cartesian")
}

/// A composite over the same sequence as `t` obtained by pulling every
/// level back along a random map into the last level, with the evident
/// morphism into `t`.
pub fn sdc_over(rng: &mut Rng, t: &SubdividedComposite, max: usize) -> (SubdividedComposite, Vec<FinFn>) {
    let n = t.n();
    let u = func_into(rng, "y", &t.levels[n], max);
    let mut to_last = vec![FinFn::identity(&t.levels[n]); n + 1];
    for i in (0..n).rev() {
        to_last[i] = compose_fn(&to_last[i + 1], &t.q2s[i]).expect("chain");
    }
    let mut levels = Vec::with_capacity(n + 1);
    let mut phis = Vec::with_capacity(n + 1);
    let mut pis = Vec::with_capacity(n + 1);
    let mut squares = Vec::with_capacity(n);
    for (i, comp) in to_last.iter().enumerate().take(n) {
        let sq = pullback(&u, comp).expect("cospan");
        levels.push(sq.apex.clone());
        pis.push(sq.proj1.clone());
        phis.push(sq.proj2.clone());
        squares.push((i, sq));
    }
    levels.push(u.dom().clone());
    pis.push(FinFn::identity(u.dom()));
    phis.push(u.clone());
    let mut q2s = Vec::with_capacity(n);
    for i in 0..n {
        let link = if i + 1 == n {
            pis[i].clone()
        } else {
            let up = compose_fn(&t.q2s[i], &phis[i]).expect("chain");
            squares[i + 1].1.mediate(&pis[i], &up).expect("cone over a pullback")
        };
        q2s.push(link);
    }
    let s = SubdividedComposite {
        start: t.start.clone(),
        over: t.over.clone(),
        levels,
        q1: compose_fn(&t.q1, &phis[0]).expect("chain"),
        q2s,
        q3: compose_fn(&t.q3, &phis[n]).expect("chain"),
        rs: (0..n).map(|i| compose_fn(&t.rs[i], &phis[i]).expect("chain")).collect(),
        ss: (0..n).map(|i| compose_fn(&t.ss[i], &phis[i + 1]).expect("chain")).collect(),
    };
    (s, phis)
}

const VAR_NAMES: [&str; 3] = ["x", "y", "z"];

fn monomial(rng: &mut Rng, vars: &[String], max_degree: u32) -> Monomial {
    let mut m = Monomial::new();
    for _ in 0..rng.gen_range(0..=max_degree) {
        if vars.is_empty() {
            break;
        }
        let v = vars[rng.gen_range(0..vars.len())].clone();
        *m.entry(v).or_insert(0) += 1;
    }
    m
}

/// A random polynomial in at most three variables, total degree at most
/// three per monomial, at most two outputs of at most three summands.
pub fn sympoly(rng: &mut Rng) -> SymPoly {
    let k = rng.gen_range(1..=VAR_NAMES.len());
    let in_vars: Vec<String> = VAR_NAMES[..k].iter().map(|s| s.to_string()).collect();
    let outs = rng.gen_range(1..=2);
    let outputs = (0..outs)
        .map(|_| (0..rng.gen_range(0..=3)).map(|_| monomial(rng, &in_vars, 3)).collect())
        .collect();
    SymPoly { in_vars, out_vars: (1..=outs).map(|i| format!("out{i}")).collect(), outputs }
}

/// A random one-variable polynomial from `input` to `output` of degree at
/// most three.
pub fn single_var(rng: &mut Rng, input: &str, output: &str) -> SymPoly {
    let vars = vec![input.to_string()];
    let outputs = vec![(0..rng.gen_range(1..=3)).map(|_| monomial(rng, &vars, 3)).collect()];
    SymPoly { in_vars: vars, out_vars: vec![output.to_string()], outputs }
}

/// Values at most `max` for every input variable.
pub fn assignment(rng: &mut Rng, s: &SymPoly, max: u64) -> Assignment {
    s.in_vars.iter().map(|v| (v.clone(), rng.gen_range(0..=max))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::terminal_sdc;
    use crate::poly::TerminalSdc;

    #[test]
    fn case_streams_are_reproducible() {
        let a: Vec<u32> = (0..4).map(|_| case_rng(42, "units", 3).gen()).collect();
        let b: Vec<u32> = (0..4).map(|_| case_rng(42, "units", 3).gen()).collect();
        assert_eq!(a, b);
        assert_ne!(case_rng(42, "units", 3).gen::<u64>(), case_rng(42, "units", 4).gen::<u64>());
    }

    #[test]
    fn generated_instances_are_well_formed() {
        let mut rng = case_rng(7, "gen", 0);
        for _ in 0..50 {
            let (x, seq) = chain(&mut rng, 2, 3);
            let t = terminal_sdc(&x, &seq).unwrap();
            let (s, phis) = sdc_over(&mut rng, &t, 3);
            s.validate().unwrap();
            let m = crate::poly::SdcMorphism::new(s.clone(), t.clone(), phis).unwrap();
            assert_eq!(TerminalSdc::build(&x, &seq).unwrap().mediate(&s).unwrap(), m);
            let q = &seq[0];
            assert!(crate::poly::is_cartesian(&cartesian_into(&mut rng, q, 3)));
            assert!(iso_into(&mut rng, q).is_invertible());
            let sl = slice(&mut rng, q.src(), 3);
            let h = slice_mor_from(&mut rng, &sl, 2);
            assert_eq!(h.src, sl);
        }
    }
}
