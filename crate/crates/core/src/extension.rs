//! Evaluation of a polynomial as the functor `Σ_{p3} Π_{p2} Δ_{p1}` between
//! slices, its action on cartesian morphisms, and the comparison
//! isomorphisms `P(q)P(p) ≅ P(q∘p)`.

use crate::error::{Error, Result};
use crate::finset::{compose_fn, FinFn, FinSet, PullbackSquare};
use crate::poly::{associator, associator_left_route, compose2, CartesianMorphism, Polynomial};
use crate::slices::{delta_mor, delta_square, dist_pullback, pi_mor, sigma_mor, DistPB, SliceMor, SliceObj};

/// The staged evaluation `x -> p(x)`:
/// `C <- C2 -> A`, `C2 <- C3 -> C4`, `C4 -> B`.
#[derive(Clone, Debug)]
pub struct EvalTrace {
    pub input: SliceObj,
    /// `C2 -> C`.
    pub counit: FinFn,
    /// `C2 -> A`.
    pub to_a: FinFn,
    /// `C3 -> C2`.
    pub p: FinFn,
    /// `C3 -> C4`.
    pub q: FinFn,
    /// `C4 -> B`.
    pub r: FinFn,
    pub output: SliceObj,
    pub(crate) corner: PullbackSquare,
    pub(crate) dpb: DistPB,
}

impl EvalTrace {
    pub fn c2(&self) -> &FinSet {
        self.counit.dom()
    }

    pub fn c3(&self) -> &FinSet {
        self.p.dom()
    }

    pub fn c4(&self) -> &FinSet {
        self.r.dom()
    }
}

/// The objects and comparison maps between the evaluations of `p` and `q`
/// along a cartesian morphism.
#[derive(Clone, Debug)]
pub struct NatComponentTrace {
    pub top: EvalTrace,
    pub bottom: EvalTrace,
    /// `C2 -> C'2`.
    pub f2: FinFn,
    /// `C3 -> C'3`.
    pub f3: FinFn,
    /// `C4 -> C'4`.
    pub f4: FinFn,
}

/// `p(x)` together with every intermediate stage.
pub fn eval_obj(p: &Polynomial, x: &SliceObj) -> Result<(SliceObj, EvalTrace)> {
    if x.base() != p.src() {
        return Err(Error::NotComposable("slice does not lie over the source of the polynomial".into()));
    }
    let corner = delta_square(&p.p1, x)?;
    let dpb = dist_pullback(&p.p2, &corner.proj2)?;
    let output = SliceObj::new(compose_fn(&p.p3, &dpb.r)?);
    let trace = EvalTrace {
        input: x.clone(),
        counit: corner.proj1.clone(),
        to_a: corner.proj2.clone(),
        p: dpb.p.clone(),
        q: dpb.q.clone(),
        r: dpb.r.clone(),
        output: output.clone(),
        corner,
        dpb,
    };
    Ok((output, trace))
}

/// `p(h): p(x1) -> p(x2)`.
pub fn eval_mor(p: &Polynomial, h: &SliceMor) -> Result<SliceMor> {
    if h.src.base() != p.src() {
        return Err(Error::NotComposable("slice morphism does not lie over the source".into()));
    }
    let d = delta_mor(&p.p1, h)?;
    let pi = pi_mor(&p.p2, &d)?;
    sigma_mor(&p.p3, &pi)
}

/// The component at `x` of the transformation `P(p) => P(q)` induced by a
/// cartesian morphism `m: p -> q`.
pub fn nat_component(m: &CartesianMorphism, x: &SliceObj) -> Result<(SliceMor, NatComponentTrace)> {
    m.validate()?;
    let (src, top) = eval_obj(&m.src, x)?;
    let (tgt, bottom) = eval_obj(&m.tgt, x)?;
    let f2 = bottom.corner.mediate(&top.counit, &compose_fn(&m.f0, &top.to_a)?)?;
    let (f3, f4) = bottom.dpb.mediate(&compose_fn(&f2, &top.p)?, &top.q, &compose_fn(&m.f1, &top.r)?)?;
    let comp = SliceMor::new(src, tgt, f4.clone())?;
    Ok((comp, NatComponentTrace { top, bottom, f2, f3, f4 }))
}

/// `π_{q,p,x}: q(p(x)) -> (q∘p)(x)`, read off the target component of the
/// associator at `(q, p, lft x)`.
pub fn coherence_component(q: &Polynomial, p: &Polynomial, x: &SliceObj) -> Result<SliceMor> {
    let a = associator(q, p, &Polynomial::lft(&x.arrow))?;
    coherence_from(q, p, x, a)
}

/// The same component through the left-built terminal composite.
pub fn coherence_component_left_route(q: &Polynomial, p: &Polynomial, x: &SliceObj) -> Result<SliceMor> {
    let a = associator_left_route(q, p, &Polynomial::lft(&x.arrow))?;
    coherence_from(q, p, x, a)
}

fn coherence_from(q: &Polynomial, p: &Polynomial, x: &SliceObj, a: CartesianMorphism) -> Result<SliceMor> {
    let (px, _) = eval_obj(p, x)?;
    let (qpx, _) = eval_obj(q, &px)?;
    let (qp_x, _) = eval_obj(&compose2(q, p)?, x)?;
    SliceMor::new(qpx, qp_x, a.f1)
}

/// `p(x)` read as the target projection of `p ∘ lft x ∘ rgt g` for an
/// arbitrary `g: C -> Z`.
pub fn eval_through_span(p: &Polynomial, x: &SliceObj, g: &FinFn) -> Result<SliceObj> {
    let span = compose2(&Polynomial::lft(&x.arrow), &Polynomial::rgt(g))?;
    Ok(SliceObj::new(compose2(p, &span)?.p3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset::mk_finset;
    use crate::slices::enumerate_slice_mors;

    fn single_var(arities: &[usize]) -> Polynomial {
        // One input, one output, one monomial x^k per entry.
        let x = mk_finset(&["x"]).unwrap();
        let usages: usize = arities.iter().sum();
        let a = FinSet::numbered("u", usages);
        let b = FinSet::numbered("m", arities.len());
        let owner: Vec<usize> = arities.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k)).collect();
        Polynomial {
            p1: FinFn::from_indices(a.clone(), x.clone(), vec![0; usages]).unwrap(),
            p2: FinFn::from_indices(a, b.clone(), owner).unwrap(),
            p3: FinFn::from_indices(b.clone(), x, vec![0; arities.len()]).unwrap(),
        }
    }

    fn fiber_slice(base: &FinSet, sizes: &[usize]) -> SliceObj {
        let total: usize = sizes.iter().sum();
        let c = FinSet::numbered("c", total);
        let images = sizes.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k)).collect();
        SliceObj::new(FinFn::from_indices(c, base.clone(), images).unwrap())
    }

    #[test]
    fn identity_evaluates_to_input() {
        let x = mk_finset(&["a", "b"]).unwrap();
        let s = fiber_slice(&x, &[2, 1]);
        let (out, trace) = eval_obj(&Polynomial::identity(&x), &s).unwrap();
        assert_eq!(out, s);
        assert_eq!(trace.c2(), s.carrier());
    }

    #[test]
    fn single_variable_counts() {
        let sq = single_var(&[2]);
        let x = sq.src().clone();
        let (out, _) = eval_obj(&sq, &fiber_slice(&x, &[3])).unwrap();
        assert_eq!(out.fiber_sizes(), vec![9]);
        let cube_plus_one = single_var(&[3, 0]);
        let two = fiber_slice(&x, &[2]);
        let pi = coherence_component(&cube_plus_one, &sq, &two).unwrap();
        assert_eq!(pi.src.carrier().len(), 65);
        assert!(pi.is_bijective());
        assert_eq!(coherence_component_left_route(&cube_plus_one, &sq, &two).unwrap(), pi);
    }

    #[test]
    fn functor_laws_on_small_slices() {
        let p = single_var(&[2, 1, 0]);
        let x = p.src().clone();
        let a = fiber_slice(&x, &[2]);
        let b = fiber_slice(&x, &[3]);
        for h in enumerate_slice_mors(&a, &b).unwrap() {
            let ph = eval_mor(&p, &h).unwrap();
            assert_eq!(ph.src, eval_obj(&p, &a).unwrap().0);
            assert_eq!(ph.tgt, eval_obj(&p, &b).unwrap().0);
        }
        let id = SliceMor::identity(&a);
        assert_eq!(eval_mor(&p, &id).unwrap(), SliceMor::identity(&eval_obj(&p, &a).unwrap().0));
    }

    #[test]
    fn component_at_terminal_is_f1() {
        let p = single_var(&[2, 1]);
        let x = p.src().clone();
        let m = CartesianMorphism::identity(&p);
        let (c, _) = nat_component(&m, &SliceObj::terminal(&x)).unwrap();
        assert_eq!(c.mediating, m.f1);
    }

    #[test]
    fn span_route_matches_direct_evaluation() {
        let p = single_var(&[2, 1]);
        let x = p.src().clone();
        let s = fiber_slice(&x, &[3]);
        let direct = eval_obj(&p, &s).unwrap().0;
        assert_eq!(eval_through_span(&p, &s, &FinFn::identity(s.carrier())).unwrap(), direct);
        let to_one = FinFn::from_indices(s.carrier().clone(), FinSet::numbered("z", 1), vec![0; 3]).unwrap();
        assert_eq!(eval_through_span(&p, &s, &to_one).unwrap().fiber_sizes(), direct.fiber_sizes());
    }
}
