//! Slices over finite sets and the three base-change functors between them,
//! together with distributivity pullbacks.
//!
//! `pi(f, x)` has carrier `{Pair(b, Sect(s))}` where `s` ranges over the
//! sections of `x` on the fiber `f⁻¹(b)`. Every induced map is computed by
//! matching elements against these canonical carriers.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::finset::{check_pullback, compose_fn, pullback, Element, FinFn, FinSet, PullbackSquare};
use crate::mutation::{self, Mutant};

/// An object `x: C -> X` of the slice over `X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SliceObj {
    pub arrow: FinFn,
}

impl SliceObj {
    pub fn new(arrow: FinFn) -> Self {
        SliceObj { arrow }
    }

    /// The terminal slice `1_X`.
    pub fn terminal(base: &FinSet) -> Self {
        SliceObj { arrow: FinFn::identity(base) }
    }

    pub fn base(&self) -> &FinSet {
        self.arrow.cod()
    }

    pub fn carrier(&self) -> &FinSet {
        self.arrow.dom()
    }

    /// Fiber cardinalities, aligned with the sorted base.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.base().len()];
        for &j in self.arrow.images() {
            out[j] += 1;
        }
        out
    }
}

/// A commuting triangle `tgt.arrow ∘ mediating = src.arrow`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceMor {
    pub src: SliceObj,
    pub tgt: SliceObj,
    pub mediating: FinFn,
}

impl SliceMor {
    pub fn new(src: SliceObj, tgt: SliceObj, mediating: FinFn) -> Result<Self> {
        if src.base() != tgt.base() {
            return Err(Error::NotComposable("slice morphism between different bases".into()));
        }
        if mediating.dom() != src.carrier() || mediating.cod() != tgt.carrier() {
            return Err(Error::NotComposable("mediating map does not fit the slices".into()));
        }
        if compose_fn(&tgt.arrow, &mediating)? != src.arrow {
            return Err(Error::NotComposable("triangle does not commute".into()));
        }
        Ok(SliceMor { src, tgt, mediating })
    }

    pub fn identity(x: &SliceObj) -> Self {
        SliceMor { src: x.clone(), tgt: x.clone(), mediating: FinFn::identity(x.carrier()) }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SliceMor) -> Result<SliceMor> {
        if self.tgt != next.src {
            return Err(Error::NotComposable("slice morphisms do not compose".into()));
        }
        Ok(SliceMor {
            src: self.src.clone(),
            tgt: next.tgt.clone(),
            mediating: compose_fn(&next.mediating, &self.mediating)?,
        })
    }

    pub fn is_bijective(&self) -> bool {
        self.mediating.is_bijective()
    }
}

fn require_base(x: &SliceObj, base: &FinSet, what: &str) -> Result<()> {
    if x.base() != base {
        return Err(Error::NotComposable(format!("{what}: slice lives over the wrong base")));
    }
    Ok(())
}

/// `Σ_f x = f ∘ x`.
pub fn sigma(f: &FinFn, x: &SliceObj) -> Result<SliceObj> {
    require_base(x, f.dom(), "sigma")?;
    Ok(SliceObj::new(compose_fn(f, &x.arrow)?))
}

pub fn sigma_mor(f: &FinFn, h: &SliceMor) -> Result<SliceMor> {
    SliceMor::new(sigma(f, &h.src)?, sigma(f, &h.tgt)?, h.mediating.clone())
}

/// The chosen pullback square computing `Δ_f y`: `proj1` is the counit leg
/// into `dom y`, `proj2` is `Δ_f y` itself.
pub fn delta_square(f: &FinFn, y: &SliceObj) -> Result<PullbackSquare> {
    require_base(y, f.cod(), "delta")?;
    pullback(&y.arrow, f)
}

/// `Δ_f y` together with the counit leg `dom(Δ_f y) -> dom y`.
pub fn delta(f: &FinFn, y: &SliceObj) -> Result<(SliceObj, FinFn)> {
    let sq = delta_square(f, y)?;
    Ok((SliceObj::new(sq.proj2), sq.proj1))
}

pub fn delta_mor(f: &FinFn, h: &SliceMor) -> Result<SliceMor> {
    let s1 = delta_square(f, &h.src)?;
    let s2 = delta_square(f, &h.tgt)?;
    let m = s2.mediate(&compose_fn(&h.mediating, &s1.proj1)?, &s1.proj2)?;
    SliceMor::new(SliceObj::new(s1.proj2), SliceObj::new(s2.proj2), m)
}

/// `Π_f x`, the slice whose fiber over `b` enumerates the sections of `x`
/// over `f⁻¹(b)`.
pub fn pi(f: &FinFn, x: &SliceObj) -> Result<SliceObj> {
    require_base(x, f.dom(), "pi")?;
    Ok(SliceObj::new(dist_pullback(f, &x.arrow)?.r))
}

/// `Π_f h`, post-composing sections with the mediating map of `h`.
pub fn pi_mor(f: &FinFn, h: &SliceMor) -> Result<SliceMor> {
    let d1 = dist_pullback(f, &h.src.arrow)?;
    let d2 = dist_pullback(f, &h.tgt.arrow)?;
    let (_, t) = d2.mediate(&compose_fn(&h.mediating, &d1.p)?, &d1.q, &d1.r)?;
    SliceMor::new(SliceObj::new(d1.r), SliceObj::new(d2.r), t)
}

/// A pullback around `(f, g)` for `g: Z -> A`, `f: A -> B`: maps
/// `p: X -> Z`, `q: X -> Y`, `r: Y -> B` such that `(g∘p, f, r, q)` is a
/// pullback. Built by [`dist_pullback`] it is a distributivity pullback.
#[derive(Clone, Debug)]
pub struct DistPB {
    pub around_f: FinFn,
    pub around_g: FinFn,
    pub upper: FinSet,
    pub lower: FinSet,
    pub p: FinFn,
    pub q: FinFn,
    pub r: FinFn,
    index: OnceLock<std::result::Result<DpbIndex, Error>>,
}

impl PartialEq for DistPB {
    fn eq(&self, other: &Self) -> bool {
        self.around_f == other.around_f
            && self.around_g == other.around_g
            && self.upper == other.upper
            && self.lower == other.lower
            && self.p == other.p
            && self.q == other.q
            && self.r == other.r
    }
}

impl Eq for DistPB {}

/// Lookup tables shared by every universal-property computation on a
/// pullback around `(f, g)`.
#[derive(Clone, Debug)]
struct DpbIndex {
    /// `(y, a) -> x` with `q(x) = y` and `g(p(x)) = a`.
    over: HashMap<(usize, usize), usize>,
    /// For each `y`, the values of `p` along the fiber `f⁻¹(r(y))`.
    sections: Vec<Vec<usize>>,
    /// `(r(y), section) -> [y, ...]`, all witnesses in increasing order.
    by_section: HashMap<(usize, Vec<usize>), Vec<usize>>,
    f_fibers: Vec<Vec<usize>>,
}

/// Seed data for [`induce_sections`].
#[derive(Clone, Debug)]
pub enum SectionSeed {
    /// A section `A -> Z` of `g`.
    OfG(FinFn),
    /// A section `B -> Y` of `r`.
    OfR(FinFn),
}

/// The triple of compatible sections `(s1, s2, s3)` of `g`, `g∘p` and `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sections {
    pub s1: FinFn,
    pub s2: FinFn,
    pub s3: FinFn,
}

impl DistPB {
    /// Packages a candidate pullback around `(f, g)`, checking only that the
    /// maps have the right boundaries.
    pub fn new(f: FinFn, g: FinFn, p: FinFn, q: FinFn, r: FinFn) -> Result<Self> {
        let fits = g.cod() == f.dom()
            && p.cod() == g.dom()
            && p.dom() == q.dom()
            && q.cod() == r.dom()
            && r.cod() == f.cod();
        if !fits {
            return Err(Error::NotAPullbackAround("boundaries do not match".into()));
        }
        Ok(DistPB {
            upper: p.dom().clone(),
            lower: r.dom().clone(),
            around_f: f,
            around_g: g,
            p,
            q,
            r,
            index: OnceLock::new(),
        })
    }

    /// The outer square `(g∘p, f, r, q)`.
    pub fn outer_square(&self) -> Result<PullbackSquare> {
        Ok(PullbackSquare {
            apex: self.upper.clone(),
            proj1: compose_fn(&self.around_g, &self.p)?,
            proj2: self.q.clone(),
            leg1: self.around_f.clone(),
            leg2: self.r.clone(),
        })
    }

    fn index(&self) -> Result<&DpbIndex> {
        self.index
            .get_or_init(|| build_index(&self.around_f, &self.around_g, &self.p, &self.q, &self.r))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// The section of `g` over `f⁻¹(r(y))` carried by `y`, as indices into
    /// `Z` aligned with the sorted fiber.
    pub fn section(&self, y: usize) -> Result<&[usize]> {
        Ok(&self.index()?.sections[y])
    }

    /// The unique `x` with `q(x) = y` and `g(p(x)) = a`.
    pub fn point_over(&self, y: usize, a: usize) -> Result<usize> {
        self.index()?
            .over
            .get(&(y, a))
            .copied()
            .ok_or_else(|| Error::NoMediator(format!("nothing over ({}, {})", self.lower.get(y), self.upper.len())))
    }

    /// Some `y` over `b` carrying the given section, if one exists.
    pub fn lookup_section(&self, b: usize, section: &[usize]) -> Result<Option<usize>> {
        let idx = self.index()?;
        match idx.by_section.get(&(b, section.to_vec())) {
            None => Ok(None),
            Some(ys) if ys.len() > 1 && mutation::paranoid() => {
                Err(Error::NoMediator(format!("section over {} is carried twice", self.around_f.cod().get(b))))
            }
            Some(ys) => Ok(Some(ys[0])),
        }
    }

    /// Fiber of `f` over the index `b`.
    pub fn f_fiber(&self, b: usize) -> Result<&[usize]> {
        Ok(&self.index()?.f_fibers[b])
    }

    /// The morphism of pullbacks around `(f, g)` from `(p', q', r')` into
    /// this one: `(s, t)` with `p∘s = p'`, `q∘s = t∘q'`, `r∘t = r'`.
    pub fn mediate(&self, p2: &FinFn, q2: &FinFn, r2: &FinFn) -> Result<(FinFn, FinFn)> {
        let other = DistPB::new(self.around_f.clone(), self.around_g.clone(), p2.clone(), q2.clone(), r2.clone())?;
        let theirs = other.index()?;
        let mine = self.index()?;
        let t: Vec<usize> = (0..other.lower.len())
            .map(|y2| {
                let b = r2.at(y2);
                self.lookup_section(b, &theirs.sections[y2])?.ok_or_else(|| {
                    Error::NoMediator(format!("no element over {} carries the required section", self.around_f.cod().get(b)))
                })
            })
            .collect::<Result<_>>()?;
        let s: Vec<usize> = (0..other.upper.len())
            .map(|x2| {
                let key = (t[q2.at(x2)], self.around_g.at(p2.at(x2)));
                mine.over.get(&key).copied().ok_or_else(|| Error::NoMediator("missing apex element".into()))
            })
            .collect::<Result<_>>()?;
        let s = FinFn::from_indices_unchecked(other.upper.clone(), self.upper.clone(), s);
        let t = FinFn::from_indices_unchecked(other.lower.clone(), self.lower.clone(), t);
        if mutation::paranoid() {
            let ok = compose_fn(&self.p, &s)? == *p2
                && compose_fn(&self.q, &s)? == compose_fn(&t, q2)?
                && compose_fn(&self.r, &t)? == *r2;
            if !ok {
                return Err(Error::NoMediator("induced pair fails its defining equations".into()));
            }
        }
        Ok((s, t))
    }
}

fn build_index(f: &FinFn, g: &FinFn, p: &FinFn, q: &FinFn, r: &FinFn) -> std::result::Result<DpbIndex, Error> {
    let f_fibers = f.fibers();
    let mut over = HashMap::with_capacity(p.dom().len());
    for x in 0..p.dom().len() {
        let a = g.at(p.at(x));
        let y = q.at(x);
        if f.at(a) != r.at(y) {
            return Err(Error::NotAPullbackAround("outer square does not commute".into()));
        }
        if over.insert((y, a), x).is_some() {
            return Err(Error::NotAPullbackAround(format!("two points over ({}, {})", r.dom().get(y), f.dom().get(a))));
        }
    }
    let mut sections = Vec::with_capacity(r.dom().len());
    let mut by_section: HashMap<(usize, Vec<usize>), Vec<usize>> = HashMap::new();
    for y in 0..r.dom().len() {
        let b = r.at(y);
        let sec = f_fibers[b]
            .iter()
            .map(|&a| {
                over.get(&(y, a)).map(|&x| p.at(x)).ok_or_else(|| {
                    Error::NotAPullbackAround(format!("no point over ({}, {})", r.dom().get(y), f.dom().get(a)))
                })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        by_section.entry((b, sec.clone())).or_default().push(y);
        sections.push(sec);
    }
    Ok(DpbIndex { over, sections, by_section, f_fibers })
}

/// The chosen distributivity pullback around `(f, g)` for `g: Z -> A` and
/// `f: A -> B`.
///
/// `lower` enumerates pairs `(b, s)` for sections `s` of `g` over
/// `f⁻¹(b)`; `upper` is the pullback of `r` along `f` and `p` evaluates the
/// section. When `f` or `g` is an identity the degenerate diagrams are used,
/// which makes `Π_f(1) = 1` and `Π_1 = 1` hold on the nose.
pub fn dist_pullback(f: &FinFn, g: &FinFn) -> Result<DistPB> {
    if g.cod() != f.dom() {
        return Err(Error::NotComposable("dist_pullback needs g: Z -> A and f: A -> B".into()));
    }
    if f.is_identity() {
        let z = g.dom();
        return DistPB::new(f.clone(), g.clone(), FinFn::identity(z), FinFn::identity(z), g.clone());
    }
    if g.is_identity() {
        return DistPB::new(f.clone(), g.clone(), FinFn::identity(f.dom()), f.clone(), FinFn::identity(f.cod()));
    }
    let a_set = f.dom();
    let z_set = g.dom();
    let f_fibers = f.fibers();
    let g_fibers = g.fibers();
    let mut lower = Vec::new();
    for (b, fiber) in f_fibers.iter().enumerate() {
        let b_elem = f.cod().get(b);
        let radix: Vec<usize> = fiber.iter().map(|&a| g_fibers[a].len()).collect();
        for choice in product_indices(&radix) {
            let entries = fiber
                .iter()
                .zip(&choice)
                .map(|(&a, &c)| (a_set.get(a).clone(), z_set.get(g_fibers[a][c]).clone()))
                .collect();
            lower.push(Element::pair(b_elem.clone(), Element::sect_sorted(entries)));
        }
    }
    if mutation::is_active(Mutant::DropPiSection) {
        lower.pop();
    }
    let lower = FinSet::new(lower)?;
    let r = FinFn::from_map(lower.clone(), f.cod().clone(), |y| y.as_pair().expect("pair").0.clone())?;
    let sq = pullback(f, &r)?;
    let p = FinFn::from_map(sq.apex.clone(), z_set.clone(), |x| {
        let (a, y) = x.as_pair().expect("pullback pair");
        let table = y.as_pair().expect("pi element").1.as_sect().expect("section table");
        let i = table.binary_search_by(|(k, _)| k.cmp(a)).expect("key in fiber");
        table[i].1.clone()
    })?;
    DistPB::new(f.clone(), g.clone(), p, sq.proj2, r)
}

/// Number of sections of `g` over each fiber of `f`, summed over the base.
fn section_count(f: &FinFn, g: &FinFn) -> u128 {
    let g_sizes: Vec<u128> = g.fibers().iter().map(|v| v.len() as u128).collect();
    f.fibers()
        .iter()
        .map(|fib| fib.iter().fold(1u128, |acc, &a| acc.saturating_mul(g_sizes[a])))
        .fold(0u128, |acc, n| acc.saturating_add(n))
}

/// Decides terminality of a pullback around `(f, g)`.
///
/// Each element `y` determines a pair `(r(y), section)`; the candidate is
/// terminal exactly when this assignment is a bijection onto all such
/// pairs. The target is counted directly, independently of
/// [`dist_pullback`].
pub fn check_dpb_terminal(cand: &DistPB) -> Result<bool> {
    let sq = cand.outer_square()?;
    match check_pullback(&sq) {
        Ok(true) => {}
        Ok(false) => return Err(Error::NotAPullbackAround("outer square is not a pullback".into())),
        Err(e) => return Err(Error::NotAPullbackAround(e.to_string())),
    }
    let idx = cand.index()?;
    let injective = idx.by_section.values().all(|ys| ys.len() == 1);
    Ok(injective && section_count(&cand.around_f, &cand.around_g) == cand.lower.len() as u128)
}

/// The component at `z` of `δ: Σ_r Π_q Δ_p -> Π_f Σ_g` for a pullback
/// around `(f, g)`.
pub fn delta_component(d: &DistPB, z: &SliceObj) -> Result<SliceMor> {
    require_base(z, d.around_g.dom(), "delta_component")?;
    let dz = delta_square(&d.p, z)?;
    let left_pi = dist_pullback(&d.q, &dz.proj2)?;
    let src = SliceObj::new(compose_fn(&d.r, &left_pi.r)?);
    let gz = compose_fn(&d.around_g, &z.arrow)?;
    let right_pi = dist_pullback(&d.around_f, &gz)?;
    let tgt = SliceObj::new(right_pi.r.clone());
    let q_fibers = d.q.fibers();
    let images = (0..left_pi.lower.len())
        .map(|w| {
            let y = left_pi.r.at(w);
            let b = d.r.at(y);
            // The section over q⁻¹(y), keyed by x.
            let over_x: HashMap<usize, usize> =
                q_fibers[y].iter().copied().zip(left_pi.section(w)?.iter().copied()).collect();
            let sec = d
                .f_fiber(b)?
                .iter()
                .map(|&a| {
                    let x = d.point_over(y, a)?;
                    Ok(dz.proj1.at(over_x[&x]))
                })
                .collect::<Result<Vec<_>>>()?;
            right_pi
                .lookup_section(b, &sec)?
                .ok_or_else(|| Error::NoMediator("target section missing".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = FinFn::from_indices(src.carrier().clone(), tgt.carrier().clone(), images)?;
    SliceMor::new(src, tgt, m)
}

/// A commuting square `k∘f = g∘h` with `f: A -> B`, `h: A -> C`,
/// `g: C -> D`, `k: B -> D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BcSquare {
    pub f: FinFn,
    pub h: FinFn,
    pub g: FinFn,
    pub k: FinFn,
}

impl BcSquare {
    pub fn new(f: FinFn, h: FinFn, g: FinFn, k: FinFn) -> Result<Self> {
        if f.dom() != h.dom() || k.dom() != f.cod() || g.dom() != h.cod() || k.cod() != g.cod() {
            return Err(Error::NotComposable("square boundaries do not match".into()));
        }
        if compose_fn(&k, &f)? != compose_fn(&g, &h)? {
            return Err(Error::NotASquare("k∘f differs from g∘h".into()));
        }
        Ok(BcSquare { f, h, g, k })
    }

    pub fn is_pullback(&self) -> Result<bool> {
        check_pullback(&PullbackSquare {
            apex: self.f.dom().clone(),
            proj1: self.f.clone(),
            proj2: self.h.clone(),
            leg1: self.k.clone(),
            leg2: self.g.clone(),
        })
    }
}

/// The left Beck–Chevalley component `α_x: Σ_f Δ_h x -> Δ_k Σ_g x`.
pub fn left_bc_component(sq: &BcSquare, x: &SliceObj) -> Result<SliceMor> {
    require_base(x, sq.h.cod(), "left_bc_component")?;
    let dh = delta_square(&sq.h, x)?;
    let src = SliceObj::new(compose_fn(&sq.f, &dh.proj2)?);
    let gx = SliceObj::new(compose_fn(&sq.g, &x.arrow)?);
    let dk = delta_square(&sq.k, &gx)?;
    let m = dk.mediate(&dh.proj1, &src.arrow)?;
    SliceMor::new(src, SliceObj::new(dk.proj2), m)
}

/// The right Beck–Chevalley component `β_x: Δ_g Π_k x -> Π_h Δ_f x`, built
/// from two distributivity pullbacks and three pullbacks.
pub fn right_bc_component(sq: &BcSquare, x: &SliceObj) -> Result<SliceMor> {
    require_base(x, sq.k.dom(), "right_bc_component")?;
    let along_k = dist_pullback(&sq.k, &x.arrow)?;
    let c2 = pullback(&along_k.r, &sq.g)?;
    let a2 = pullback(&x.arrow, &sq.f)?;
    let along_h = dist_pullback(&sq.h, &a2.proj2)?;
    let top = pullback(&a2.proj1, &along_k.p)?;
    let to_d2 = compose_fn(&along_k.q, &top.proj2)?;
    let to_c = compose_fn(&sq.h, &compose_fn(&a2.proj2, &top.proj1)?)?;
    let a4_to_c2 = c2.mediate(&to_d2, &to_c)?;
    let (_, beta) = along_h.mediate(&top.proj1, &a4_to_c2, &c2.proj2)?;
    SliceMor::new(SliceObj::new(c2.proj2), SliceObj::new(along_h.r), beta)
}

/// The compatible section triple determined by either end.
pub fn induce_sections(d: &DistPB, seed: &SectionSeed) -> Result<Sections> {
    let f = &d.around_f;
    let g = &d.around_g;
    let s3 = match seed {
        SectionSeed::OfG(s1) => {
            if s1.dom() != f.dom() || s1.cod() != g.dom() || !compose_fn(g, s1)?.is_identity() {
                return Err(Error::NotASection("s1 is not a section of g".into()));
            }
            let images = (0..f.cod().len())
                .map(|b| {
                    let sec: Vec<usize> = d.f_fiber(b)?.iter().map(|&a| s1.at(a)).collect();
                    d.lookup_section(b, &sec)?.ok_or_else(|| Error::NoMediator("no element carries s1".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            FinFn::from_indices_unchecked(f.cod().clone(), d.lower.clone(), images)
        }
        SectionSeed::OfR(s3) => {
            if s3.dom() != f.cod() || s3.cod() != &d.lower || !compose_fn(&d.r, s3)?.is_identity() {
                return Err(Error::NotASection("s3 is not a section of r".into()));
            }
            s3.clone()
        }
    };
    let s2 = (0..f.dom().len())
        .map(|a| d.point_over(s3.at(f.at(a)), a))
        .collect::<Result<Vec<_>>>()?;
    let s2 = FinFn::from_indices_unchecked(f.dom().clone(), d.upper.clone(), s2);
    let s1 = compose_fn(&d.p, &s2)?;
    if let SectionSeed::OfG(seed1) = seed {
        if &s1 != seed1 {
            return Err(Error::NoMediator("induced s2 does not restrict to s1".into()));
        }
    }
    Ok(Sections { s1, s2, s3 })
}

/// Every slice morphism `x -> y`, in lexicographic order of the mediating
/// map. Exponential in `|dom x|`; meant for tiny test instances.
pub fn enumerate_slice_mors(x: &SliceObj, y: &SliceObj) -> Result<Vec<SliceMor>> {
    if x.base() != y.base() {
        return Err(Error::NotComposable("slices over different bases".into()));
    }
    let y_fibers = y.arrow.fibers();
    let options: Vec<&[usize]> = x.arrow.images().iter().map(|&b| y_fibers[b].as_slice()).collect();
    let mut out = Vec::new();
    for choice in product_indices(&options.iter().map(|o| o.len()).collect::<Vec<_>>()) {
        let images = choice.iter().zip(&options).map(|(&c, o)| o[c]).collect();
        out.push(SliceMor {
            src: x.clone(),
            tgt: y.clone(),
            mediating: FinFn::from_indices_unchecked(x.carrier().clone(), y.carrier().clone(), images),
        });
    }
    Ok(out)
}

/// All index tuples of the product `0..radix[0] × 0..radix[1] × ...`, in
/// lexicographic order.
pub fn product_indices(radix: &[usize]) -> Vec<Vec<usize>> {
    if radix.contains(&0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; radix.len()];
    loop {
        out.push(cur.clone());
        let mut k = radix.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < radix[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset::mk_finset;

    fn set(tokens: &[&str]) -> FinSet {
        mk_finset(tokens).unwrap()
    }

    fn func(dom: &FinSet, cod: &FinSet, pairs: &[(&str, &str)]) -> FinFn {
        FinFn::new(dom.clone(), cod.clone(), pairs.iter().map(|(a, b)| (Element::atom(a), Element::atom(b)))).unwrap()
    }

    /// `g` with fibers of sizes 2 and 3 over `{a1, a2}`, `f` constant.
    fn two_three() -> (FinFn, FinFn) {
        let z = set(&["z1", "z2", "z3", "z4", "z5"]);
        let a = set(&["a1", "a2"]);
        let b = set(&["b"]);
        let g = func(&z, &a, &[("z1", "a1"), ("z2", "a1"), ("z3", "a2"), ("z4", "a2"), ("z5", "a2")]);
        let f = func(&a, &b, &[("a1", "b"), ("a2", "b")]);
        (f, g)
    }

    #[test]
    fn sigma_composes() {
        let a = set(&["a"]);
        let b = set(&["b"]);
        let c = set(&["c1", "c2"]);
        let f = func(&a, &b, &[("a", "b")]);
        let x = SliceObj::new(func(&c, &a, &[("c1", "a"), ("c2", "a")]));
        let s = sigma(&f, &x).unwrap();
        assert_eq!(s.base(), &b);
        assert_eq!(s.fiber_sizes(), vec![2]);
        assert_eq!(sigma(&FinFn::identity(&a), &x).unwrap(), x);
        assert_eq!(sigma(&f, &SliceObj::terminal(&a)).unwrap().arrow, f);
    }

    #[test]
    fn delta_conventions() {
        let (f, _) = two_three();
        let b = f.cod().clone();
        let (d, counit) = delta(&f, &SliceObj::terminal(&b)).unwrap();
        assert_eq!(d, SliceObj::terminal(f.dom()));
        assert_eq!(counit, f);
        let y = SliceObj::new(func(&set(&["y1", "y2", "y3"]), &b, &[("y1", "b"), ("y2", "b"), ("y3", "b")]));
        let (d, counit) = delta(&FinFn::identity(&b), &y).unwrap();
        assert_eq!(d, y);
        assert!(counit.is_identity());
        let (d, _) = delta(&f, &y).unwrap();
        assert_eq!(d.carrier().len(), 6);
        assert_eq!(d.base(), f.dom());
    }

    #[test]
    fn pi_counts_sections() {
        let (f, g) = two_three();
        let px = pi(&f, &SliceObj::new(g.clone())).unwrap();
        assert_eq!(px.fiber_sizes(), vec![6]);
        assert_eq!(pi(&f, &SliceObj::terminal(f.dom())).unwrap(), SliceObj::terminal(f.cod()));
        let empty = FinSet::empty();
        let b = set(&["b"]);
        let f0 = FinFn::from_empty(&b);
        let p0 = pi(&f0, &SliceObj::terminal(&empty)).unwrap();
        assert_eq!(p0, SliceObj::terminal(&b));
        // Not normalized away: a non-identity cod.
        let x0 = SliceObj::new(FinFn::from_empty(&empty));
        let f1 = func(&set(&[]), &set(&["b", "c"]), &[]);
        assert_eq!(pi(&f1, &x0).unwrap().fiber_sizes(), vec![1, 1]);
    }

    #[test]
    fn dist_pullback_shape() {
        let (f, g) = two_three();
        let d = dist_pullback(&f, &g).unwrap();
        assert_eq!(d.lower.len(), 6);
        assert_eq!(d.upper.len(), 12);
        for x in d.upper.iter() {
            let (a, y) = x.as_pair().unwrap();
            let table = y.as_pair().unwrap().1.as_sect().unwrap();
            let val = &table.iter().find(|(k, _)| k == a).unwrap().1;
            assert_eq!(d.p.apply(x), Some(val));
        }
        assert!(check_dpb_terminal(&d).unwrap());
    }

    #[test]
    fn dist_pullback_identity_conventions() {
        let (f, g) = two_three();
        let d = dist_pullback(&FinFn::identity(g.cod()), &g).unwrap();
        assert!(d.p.is_identity() && d.q.is_identity());
        assert_eq!(d.r, g);
        let d = dist_pullback(&f, &FinFn::identity(f.dom())).unwrap();
        assert!(d.p.is_identity() && d.r.is_identity());
        assert_eq!(d.q, f);
        assert!(check_dpb_terminal(&d).unwrap());
        let id = FinFn::identity(f.dom());
        assert!(check_dpb_terminal(&dist_pullback(&id, &id).unwrap()).unwrap());
    }

    fn drop_lower(d: &DistPB, keep: impl Fn(usize) -> bool) -> DistPB {
        let ys: Vec<usize> = (0..d.lower.len()).filter(|&y| keep(y)).collect();
        let lower = FinSet::new(ys.iter().map(|&y| d.lower.get(y).clone())).unwrap();
        let xs: Vec<usize> = (0..d.upper.len()).filter(|&x| ys.contains(&d.q.at(x))).collect();
        let upper = FinSet::new(xs.iter().map(|&x| d.upper.get(x).clone())).unwrap();
        let restrict = |m: &FinFn, dom: &FinSet, cod: &FinSet| {
            FinFn::from_map(dom.clone(), cod.clone(), |e| m.apply(e).unwrap().clone()).unwrap()
        };
        DistPB::new(
            d.around_f.clone(),
            d.around_g.clone(),
            restrict(&d.p, &upper, d.p.cod()),
            restrict(&d.q, &upper, &lower),
            restrict(&d.r, &lower, d.r.cod()),
        )
        .unwrap()
    }

    #[test]
    fn subset_of_sections_is_not_terminal() {
        let (f, g) = two_three();
        let d = dist_pullback(&f, &g).unwrap();
        let small = drop_lower(&d, |y| y != 0);
        assert!(!check_dpb_terminal(&small).unwrap());
        let comp = delta_component(&small, &SliceObj::terminal(g.dom())).unwrap();
        assert!(!comp.is_bijective());
    }

    #[test]
    fn delta_component_is_bijective_on_dpb() {
        let (f, g) = two_three();
        let d = dist_pullback(&f, &g).unwrap();
        let z = SliceObj::new(func(
            &set(&["c1", "c2", "c3"]),
            g.dom(),
            &[("c1", "z1"), ("c2", "z1"), ("c3", "z4")],
        ));
        assert!(delta_component(&d, &z).unwrap().is_bijective());
        assert!(delta_component(&d, &SliceObj::terminal(g.dom())).unwrap().is_bijective());
    }

    #[test]
    fn induce_sections_from_splitting() {
        let (f, g) = two_three();
        let d = dist_pullback(&f, &g).unwrap();
        let s1 = func(g.cod(), g.dom(), &[("a1", "z2"), ("a2", "z3")]);
        let s = induce_sections(&d, &SectionSeed::OfG(s1.clone())).unwrap();
        assert_eq!(s.s1, s1);
        assert!(compose_fn(&d.r, &s.s3).unwrap().is_identity());
        assert_eq!(compose_fn(&d.q, &s.s2).unwrap(), compose_fn(&s.s3, &f).unwrap());
        let back = induce_sections(&d, &SectionSeed::OfR(s.s3.clone())).unwrap();
        assert_eq!(back, s);
        let bad = func(g.cod(), g.dom(), &[("a1", "z3"), ("a2", "z3")]);
        assert!(matches!(induce_sections(&d, &SectionSeed::OfG(bad)), Err(Error::NotASection(_))));
    }

    #[test]
    fn induce_sections_degenerate() {
        let (f, _) = two_three();
        let a = f.dom();
        let d = dist_pullback(&f, &FinFn::identity(a)).unwrap();
        let s = induce_sections(&d, &SectionSeed::OfG(FinFn::identity(a))).unwrap();
        assert!(s.s1.is_identity() && s.s2.is_identity() && s.s3.is_identity());
        let z = set(&["z1", "z2"]);
        let g = func(&z, &set(&["a"]), &[("z1", "a"), ("z2", "a")]);
        let d = dist_pullback(&FinFn::identity(g.cod()), &g).unwrap();
        let s3 = func(g.cod(), &z, &[("a", "z2")]);
        let s = induce_sections(&d, &SectionSeed::OfR(s3.clone())).unwrap();
        assert_eq!(s.s1, s3);
    }

    fn constant_square() -> BcSquare {
        // A = {a}, B = C = D = {*}: a pullback only when A is a singleton.
        let a = set(&["a1", "a2"]);
        let one = set(&["o"]);
        let to_one = func(&a, &one, &[("a1", "o"), ("a2", "o")]);
        let id = FinFn::identity(&one);
        BcSquare::new(to_one.clone(), to_one, id.clone(), id).unwrap()
    }

    #[test]
    fn beck_chevalley_cells() {
        let sq = constant_square();
        assert!(!sq.is_pullback().unwrap());
        let one = sq.g.dom().clone();
        let alpha = left_bc_component(&sq, &SliceObj::terminal(&one)).unwrap();
        assert!(!alpha.is_bijective());
        // At x = 1 both sides are terminal, so beta needs a larger probe.
        assert!(right_bc_component(&sq, &SliceObj::terminal(&one)).unwrap().is_bijective());
        let two = set(&["t1", "t2"]);
        let x = SliceObj::new(func(&two, &one, &[("t1", "o"), ("t2", "o")]));
        let beta = right_bc_component(&sq, &x).unwrap();
        assert_eq!((beta.src.carrier().len(), beta.tgt.carrier().len()), (2, 4));

        let (f, g) = two_three();
        // The pullback square of g along the identity of its codomain.
        let sq = BcSquare::new(g.clone(), FinFn::identity(g.dom()), g.clone(), FinFn::identity(g.cod())).unwrap();
        assert!(sq.is_pullback().unwrap());
        let x = SliceObj::new(func(&set(&["c1", "c2", "c3"]), g.cod(), &[("c1", "a1"), ("c2", "a1"), ("c3", "a2")]));
        assert!(left_bc_component(&sq, &SliceObj::terminal(g.dom())).unwrap().is_bijective());
        assert!(right_bc_component(&sq, &x).unwrap().is_bijective());
        let _ = f;
    }

    #[test]
    fn slice_homs_and_product() {
        assert_eq!(product_indices(&[2, 3]).len(), 6);
        assert_eq!(product_indices(&[]), vec![Vec::<usize>::new()]);
        assert!(product_indices(&[2, 0]).is_empty());
        let (_, g) = two_three();
        let x = SliceObj::new(g.clone());
        assert_eq!(enumerate_slice_mors(&x, &x).unwrap().len(), 2 * 2 * 3 * 3 * 3);
    }
}
