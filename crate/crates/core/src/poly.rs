//! Polynomials `X <- A -> B -> Y`, cartesian morphisms between them, and
//! composition through terminal subdivided composites.
//!
//! Index conventions for a subdivided composite over `n` polynomials:
//! `levels[0..=n]`, `q2s[i]: levels[i] -> levels[i+1]`,
//! `rs[i]: levels[i] -> A_i` and `ss[i]: levels[i+1] -> B_i`.

use crate::error::{Error, Result};
use crate::finset::{check_pullback, compose_fn, pullback, FinFn, FinSet, PullbackSquare};
use crate::mutation::{self, Mutant};
use crate::slices::{dist_pullback, DistPB, SliceMor, SliceObj};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    pub p1: FinFn,
    pub p2: FinFn,
    pub p3: FinFn,
}

/// Which end of a polynomial a projection or embedding refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Validates and packages `X <-p1- A -p2-> B -p3-> Y`.
pub fn mk_poly(p1: FinFn, p2: FinFn, p3: FinFn) -> Result<Polynomial> {
    if p1.dom() != p2.dom() {
        return Err(Error::IllFormedPolynomial("p1 and p2 have different domains".into()));
    }
    if p2.cod() != p3.dom() {
        return Err(Error::IllFormedPolynomial("p2 does not land in the domain of p3".into()));
    }
    Ok(Polynomial { p1, p2, p3 })
}

impl Polynomial {
    pub fn src(&self) -> &FinSet {
        self.p1.cod()
    }

    pub fn mid_src(&self) -> &FinSet {
        self.p1.dom()
    }

    pub fn mid_tgt(&self) -> &FinSet {
        self.p3.dom()
    }

    pub fn tgt(&self) -> &FinSet {
        self.p3.cod()
    }

    /// The identity polynomial `X <- X -> X -> X`.
    pub fn identity(x: &FinSet) -> Self {
        let id = FinFn::identity(x);
        Polynomial { p1: id.clone(), p2: id.clone(), p3: id }
    }

    /// `lft f = (1, 1, f)`.
    pub fn lft(f: &FinFn) -> Self {
        let id = FinFn::identity(f.dom());
        Polynomial { p1: id.clone(), p2: id, p3: f.clone() }
    }

    /// `rgt f = (f, 1, 1)`.
    pub fn rgt(f: &FinFn) -> Self {
        let id = FinFn::identity(f.dom());
        Polynomial { p1: f.clone(), p2: id.clone(), p3: id }
    }

    pub fn is_span(&self) -> bool {
        self.p2.is_identity()
    }

    pub fn is_lft(&self) -> bool {
        self.p1.is_identity() && self.p2.is_identity()
    }

    pub fn is_rgt(&self) -> bool {
        self.p2.is_identity() && self.p3.is_identity()
    }
}

/// `lft f` for [`Side::Left`], `rgt f` for [`Side::Right`].
pub fn embed_map(f: &FinFn, side: Side) -> Polynomial {
    match side {
        Side::Left => Polynomial::lft(f),
        Side::Right => Polynomial::rgt(f),
    }
}

/// The left projection `p1` as a slice over the source, or the right
/// projection `p3` over the target.
pub fn hom_project(p: &Polynomial, side: Side) -> SliceObj {
    match side {
        Side::Left => SliceObj::new(p.p1.clone()),
        Side::Right => SliceObj::new(p.p3.clone()),
    }
}

/// A pair `(f0: A -> A', f1: B -> B')` between parallel polynomials whose
/// middle square is a pullback.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartesianMorphism {
    pub src: Polynomial,
    pub tgt: Polynomial,
    pub f0: FinFn,
    pub f1: FinFn,
}

impl CartesianMorphism {
    /// Builds and validates a cartesian morphism.
    pub fn new(src: Polynomial, tgt: Polynomial, f0: FinFn, f1: FinFn) -> Result<Self> {
        let m = CartesianMorphism { src, tgt, f0, f1 };
        m.validate()?;
        Ok(m)
    }

    /// Packages components without checking them; see [`is_cartesian`].
    pub fn new_unchecked(src: Polynomial, tgt: Polynomial, f0: FinFn, f1: FinFn) -> Self {
        CartesianMorphism { src, tgt, f0, f1 }
    }

    pub fn identity(p: &Polynomial) -> Self {
        CartesianMorphism {
            src: p.clone(),
            tgt: p.clone(),
            f0: FinFn::identity(p.mid_src()),
            f1: FinFn::identity(p.mid_tgt()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (p, q) = (&self.src, &self.tgt);
        if p.src() != q.src() || p.tgt() != q.tgt() {
            return Err(Error::NotCartesian("polynomials are not parallel".into()));
        }
        if self.f0.dom() != p.mid_src()
            || self.f0.cod() != q.mid_src()
            || self.f1.dom() != p.mid_tgt()
            || self.f1.cod() != q.mid_tgt()
        {
            return Err(Error::NotCartesian("components have the wrong boundaries".into()));
        }
        if compose_fn(&q.p1, &self.f0)? != p.p1 || compose_fn(&q.p3, &self.f1)? != p.p3 {
            return Err(Error::NotCartesian("outer triangles do not commute".into()));
        }
        let sq = PullbackSquare {
            apex: p.mid_src().clone(),
            proj1: self.f0.clone(),
            proj2: p.p2.clone(),
            leg1: q.p2.clone(),
            leg2: self.f1.clone(),
        };
        match check_pullback(&sq) {
            Ok(true) => Ok(()),
            Ok(false) => Err(Error::NotCartesian("middle square is not a pullback".into())),
            Err(e) => Err(Error::NotCartesian(e.to_string())),
        }
    }

    /// Vertical composite: `self` followed by `next`.
    pub fn then(&self, next: &CartesianMorphism) -> Result<CartesianMorphism> {
        if self.tgt != next.src {
            return Err(Error::NotComposable("cartesian morphisms do not compose".into()));
        }
        Ok(CartesianMorphism {
            src: self.src.clone(),
            tgt: next.tgt.clone(),
            f0: compose_fn(&next.f0, &self.f0)?,
            f1: compose_fn(&next.f1, &self.f1)?,
        })
    }

    pub fn is_invertible(&self) -> bool {
        self.f0.is_bijective() && self.f1.is_bijective()
    }

    pub fn inverse(&self) -> Option<CartesianMorphism> {
        Some(CartesianMorphism {
            src: self.tgt.clone(),
            tgt: self.src.clone(),
            f0: self.f0.inverse()?,
            f1: self.f1.inverse()?,
        })
    }

    /// The image under a hom projection: `f0` over the source or `f1` over
    /// the target.
    pub fn project(&self, side: Side) -> Result<SliceMor> {
        match side {
            Side::Left => {
                SliceMor::new(hom_project(&self.src, side), hom_project(&self.tgt, side), self.f0.clone())
            }
            Side::Right => {
                SliceMor::new(hom_project(&self.src, side), hom_project(&self.tgt, side), self.f1.clone())
            }
        }
    }
}

pub fn is_cartesian(m: &CartesianMorphism) -> bool {
    m.validate().is_ok()
}

/// Intermediate staged data over a composable sequence of polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdividedComposite {
    /// `X_0`; needed to place the composite when `over` is empty.
    pub start: FinSet,
    pub over: Vec<Polynomial>,
    pub levels: Vec<FinSet>,
    pub q1: FinFn,
    pub q2s: Vec<FinFn>,
    pub q3: FinFn,
    pub rs: Vec<FinFn>,
    pub ss: Vec<FinFn>,
}

fn check_composable(start: &FinSet, seq: &[Polynomial]) -> Result<()> {
    let mut at = start;
    for (i, p) in seq.iter().enumerate() {
        if p.src() != at {
            return Err(Error::NotComposable(format!("polynomial {i} does not start where the previous one ends")));
        }
        at = p.tgt();
    }
    Ok(())
}

fn end_of<'a>(start: &'a FinSet, seq: &'a [Polynomial]) -> &'a FinSet {
    seq.last().map_or(start, |p| p.tgt())
}

impl SubdividedComposite {
    pub fn n(&self) -> usize {
        self.over.len()
    }

    pub fn end(&self) -> &FinSet {
        end_of(&self.start, &self.over)
    }

    /// The identity endospan, terminal among composites over no polynomials.
    pub fn identity_span(x: &FinSet) -> Self {
        SubdividedComposite {
            start: x.clone(),
            over: Vec::new(),
            levels: vec![x.clone()],
            q1: FinFn::identity(x),
            q2s: Vec::new(),
            q3: FinFn::identity(x),
            rs: Vec::new(),
            ss: Vec::new(),
        }
    }

    /// The tautological composite over `[p]`.
    pub fn of_polynomial(p: &Polynomial) -> Self {
        SubdividedComposite {
            start: p.src().clone(),
            over: vec![p.clone()],
            levels: vec![p.mid_src().clone(), p.mid_tgt().clone()],
            q1: p.p1.clone(),
            q2s: vec![p.p2.clone()],
            q3: p.p3.clone(),
            rs: vec![FinFn::identity(p.mid_src())],
            ss: vec![FinFn::identity(p.mid_tgt())],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let bad = |msg: String| Err(Error::IllFormedComposite(msg));
        check_composable(&self.start, &self.over)?;
        if self.levels.len() != n + 1 || self.q2s.len() != n || self.rs.len() != n || self.ss.len() != n {
            return bad("wrong number of levels or maps".into());
        }
        if self.q1.dom() != &self.levels[0] || self.q1.cod() != &self.start {
            return bad("q1 has the wrong boundary".into());
        }
        if self.q3.dom() != &self.levels[n] || self.q3.cod() != self.end() {
            return bad("q3 has the wrong boundary".into());
        }
        if n == 0 {
            if self.q1 != self.q3 {
                return bad("a composite over no polynomials needs q1 = q3".into());
            }
            return Ok(());
        }
        for i in 0..n {
            let p = &self.over[i];
            if self.q2s[i].dom() != &self.levels[i] || self.q2s[i].cod() != &self.levels[i + 1] {
                return bad(format!("q2 at {i} has the wrong boundary"));
            }
            if self.rs[i].dom() != &self.levels[i] || self.rs[i].cod() != p.mid_src() {
                return bad(format!("r at {i} has the wrong boundary"));
            }
            if self.ss[i].dom() != &self.levels[i + 1] || self.ss[i].cod() != p.mid_tgt() {
                return bad(format!("s at {i} has the wrong boundary"));
            }
            let sq = PullbackSquare {
                apex: self.levels[i].clone(),
                proj1: self.rs[i].clone(),
                proj2: self.q2s[i].clone(),
                leg1: p.p2.clone(),
                leg2: self.ss[i].clone(),
            };
            match check_pullback(&sq) {
                Ok(true) => {}
                Ok(false) => return bad(format!("square at {i} is not a pullback")),
                Err(e) => return bad(format!("square at {i}: {e}")),
            }
        }
        if compose_fn(&self.over[0].p1, &self.rs[0])? != self.q1 {
            return bad("q1 differs from p11 r1".into());
        }
        if compose_fn(&self.over[n - 1].p3, &self.ss[n - 1])? != self.q3 {
            return bad("q3 differs from pn3 sn".into());
        }
        for i in 0..n - 1 {
            let lhs = compose_fn(&self.over[i + 1].p1, &self.rs[i + 1])?;
            let rhs = compose_fn(&self.over[i].p3, &self.ss[i])?;
            if lhs != rhs {
                return bad(format!("seam between {i} and {} does not commute", i + 1));
            }
        }
        Ok(())
    }

    /// `(q1, q2n ∘ ... ∘ q21, q3)`.
    pub fn associated_polynomial(&self) -> Polynomial {
        let mut q2 = FinFn::identity(&self.levels[0]);
        for m in &self.q2s {
            q2 = compose_fn(m, &q2).expect("levels chain");
        }
        Polynomial { p1: self.q1.clone(), p2: q2, p3: self.q3.clone() }
    }

    /// Forgets the last polynomial.
    pub fn res_last(&self) -> Result<SubdividedComposite> {
        let n = self.n();
        if n == 0 {
            return Err(Error::IllFormedComposite("nothing to restrict".into()));
        }
        let q3 = if n == 1 { self.q1.clone() } else { compose_fn(&self.over[n - 2].p3, &self.ss[n - 2])? };
        Ok(SubdividedComposite {
            start: self.start.clone(),
            over: self.over[..n - 1].to_vec(),
            levels: self.levels[..n].to_vec(),
            q1: self.q1.clone(),
            q2s: self.q2s[..n - 1].to_vec(),
            q3,
            rs: self.rs[..n - 1].to_vec(),
            ss: self.ss[..n - 1].to_vec(),
        })
    }

    /// Forgets the first polynomial.
    pub fn res_first(&self) -> Result<SubdividedComposite> {
        let n = self.n();
        if n == 0 {
            return Err(Error::IllFormedComposite("nothing to restrict".into()));
        }
        let q1 = if n == 1 { self.q3.clone() } else { compose_fn(&self.over[1].p1, &self.rs[1])? };
        Ok(SubdividedComposite {
            start: self.over[0].tgt().clone(),
            over: self.over[1..].to_vec(),
            levels: self.levels[1..].to_vec(),
            q1,
            q2s: self.q2s[1..].to_vec(),
            q3: self.q3.clone(),
            rs: self.rs[1..].to_vec(),
            ss: self.ss[1..].to_vec(),
        })
    }
}

pub fn associated_polynomial(sdc: &SubdividedComposite) -> Polynomial {
    sdc.associated_polynomial()
}

/// Components `t_i: Y_i -> Y'_i` commuting with all the structure maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdcMorphism {
    pub src: SubdividedComposite,
    pub tgt: SubdividedComposite,
    pub ts: Vec<FinFn>,
}

impl SdcMorphism {
    pub fn new(src: SubdividedComposite, tgt: SubdividedComposite, ts: Vec<FinFn>) -> Result<Self> {
        let m = SdcMorphism { src, tgt, ts };
        m.validate()?;
        Ok(m)
    }

    pub fn identity(s: &SubdividedComposite) -> Self {
        SdcMorphism { src: s.clone(), tgt: s.clone(), ts: s.levels.iter().map(FinFn::identity).collect() }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = (&self.src, &self.tgt);
        let bad = |msg: &str| Err(Error::IllFormedComposite(format!("morphism: {msg}")));
        if a.over != b.over || a.start != b.start || self.ts.len() != a.levels.len() {
            return bad("composites over different sequences");
        }
        for (i, t) in self.ts.iter().enumerate() {
            if t.dom() != &a.levels[i] || t.cod() != &b.levels[i] {
                return bad("component with the wrong boundary");
            }
        }
        let n = a.n();
        if compose_fn(&b.q1, &self.ts[0])? != a.q1 || compose_fn(&b.q3, &self.ts[n])? != a.q3 {
            return bad("q1 or q3 not preserved");
        }
        for i in 0..n {
            if compose_fn(&b.q2s[i], &self.ts[i])? != compose_fn(&self.ts[i + 1], &a.q2s[i])? {
                return bad("q2 not preserved");
            }
            if compose_fn(&b.rs[i], &self.ts[i])? != a.rs[i] || compose_fn(&b.ss[i], &self.ts[i + 1])? != a.ss[i] {
                return bad("r or s not preserved");
            }
        }
        Ok(())
    }

    pub fn then(&self, next: &SdcMorphism) -> Result<SdcMorphism> {
        if self.tgt != next.src {
            return Err(Error::NotComposable("composite morphisms do not compose".into()));
        }
        let ts = self.ts.iter().zip(&next.ts).map(|(a, b)| compose_fn(b, a)).collect::<Result<_>>()?;
        Ok(SdcMorphism { src: self.src.clone(), tgt: next.tgt.clone(), ts })
    }

    pub fn inverse(&self) -> Option<SdcMorphism> {
        let ts = self.ts.iter().map(FinFn::inverse).collect::<Option<Vec<_>>>()?;
        Some(SdcMorphism { src: self.tgt.clone(), tgt: self.src.clone(), ts })
    }

    pub fn is_iso(&self) -> bool {
        self.ts.iter().all(FinFn::is_bijective)
    }

    /// Image under `ass`: the outer components `(t_0, t_n)`.
    pub fn associated(&self) -> CartesianMorphism {
        CartesianMorphism {
            src: self.src.associated_polynomial(),
            tgt: self.tgt.associated_polynomial(),
            f0: self.ts[0].clone(),
            f1: self.ts[self.ts.len() - 1].clone(),
        }
    }
}

/// `p_n · S` with its couniversal data retained, so that maps into it can
/// be induced.
#[derive(Clone, Debug)]
pub struct RightExtension {
    pub base: SubdividedComposite,
    pub poly: Polynomial,
    /// `C`, the pullback of `q3` and `p_{n1}`.
    pub corner: PullbackSquare,
    pub dpb: DistPB,
    /// `squares[k]` defines level `k`, for `k < n - 1`.
    pub squares: Vec<PullbackSquare>,
    pub result: SubdividedComposite,
    /// The counit `res_n(p_n · S) -> S`.
    pub counit: SdcMorphism,
}

/// The right adjoint to forgetting the last polynomial, applied to `sdc`.
pub fn extend_right(poly: &Polynomial, sdc: &SubdividedComposite) -> Result<RightExtension> {
    let m = sdc.n();
    if sdc.end() != poly.src() {
        return Err(Error::NotComposable("polynomial does not start where the composite ends".into()));
    }
    let corner = pullback(&sdc.q3, &poly.p1)?;
    let dpb = dist_pullback(&poly.p2, &corner.proj2)?;
    let mut eps = vec![None; m + 1];
    eps[m] = Some(compose_fn(&corner.proj1, &dpb.p)?);
    let mut levels = vec![None; m + 2];
    levels[m] = Some(dpb.upper.clone());
    levels[m + 1] = Some(dpb.lower.clone());
    let mut q2s = vec![None; m + 1];
    q2s[m] = Some(dpb.q.clone());
    let mut squares = vec![None; m];
    for k in (0..m).rev() {
        let sq = pullback(eps[k + 1].as_ref().unwrap(), &sdc.q2s[k])?;
        levels[k] = Some(sq.apex.clone());
        q2s[k] = Some(sq.proj1.clone());
        eps[k] = Some(sq.proj2.clone());
        squares[k] = Some(sq);
    }
    let eps: Vec<FinFn> = eps.into_iter().map(Option::unwrap).collect();
    let mut rs = Vec::with_capacity(m + 1);
    let mut ss = Vec::with_capacity(m + 1);
    for i in 0..m {
        rs.push(compose_fn(&sdc.rs[i], &eps[i])?);
        ss.push(compose_fn(&sdc.ss[i], &eps[i + 1])?);
    }
    rs.push(compose_fn(&corner.proj2, &dpb.p)?);
    ss.push(dpb.r.clone());
    let mut over = sdc.over.clone();
    over.push(poly.clone());
    let result = SubdividedComposite {
        start: sdc.start.clone(),
        over,
        levels: levels.into_iter().map(Option::unwrap).collect(),
        q1: compose_fn(&sdc.q1, &eps[0])?,
        q2s: q2s.into_iter().map(Option::unwrap).collect(),
        q3: compose_fn(&poly.p3, &dpb.r)?,
        rs,
        ss,
    };
    let counit = SdcMorphism { src: result.res_last()?, tgt: sdc.clone(), ts: eps };
    Ok(RightExtension {
        base: sdc.clone(),
        poly: poly.clone(),
        corner,
        dpb,
        squares: squares.into_iter().map(Option::unwrap).collect(),
        result,
        counit,
    })
}

impl RightExtension {
    /// Given `S'` over the extended sequence and `t: res_n(S') -> base`, the
    /// unique `t': S' -> p_n · base` with `counit ∘ res_n(t') = t`.
    pub fn mediate(&self, s: &SubdividedComposite, t: &SdcMorphism) -> Result<SdcMorphism> {
        let m = self.base.n();
        if s.over != self.result.over || t.tgt != self.base {
            return Err(Error::NotComposable("cone does not fit the extension".into()));
        }
        let u = self.corner.mediate(&t.ts[m], &s.rs[m])?;
        let (a, b) = self.dpb.mediate(&u, &s.q2s[m], &s.ss[m])?;
        let mut ts = vec![None; m + 2];
        ts[m] = Some(a);
        ts[m + 1] = Some(b);
        for k in (0..m).rev() {
            let up = compose_fn(ts[k + 1].as_ref().unwrap(), &s.q2s[k])?;
            ts[k] = Some(self.squares[k].mediate(&up, &t.ts[k])?);
        }
        SdcMorphism::new(s.clone(), self.result.clone(), ts.into_iter().map(Option::unwrap).collect())
    }
}

/// `S · p_1` with its couniversal data retained.
#[derive(Clone, Debug)]
pub struct LeftExtension {
    pub base: SubdividedComposite,
    pub poly: Polynomial,
    /// `C_02`, the pullback of `q1` and `p_{13}`.
    pub corner: PullbackSquare,
    /// `C_{i1} -> C_{i2}` for `i = 1..=m`, stored at `i - 1`.
    pub dpbs: Vec<DistPB>,
    /// `squares[j]` defines level `j`, for `j < m` (all `j < 1` when
    /// `m = 0`).
    pub squares: Vec<PullbackSquare>,
    pub result: SubdividedComposite,
    pub counit: SdcMorphism,
}

/// The right adjoint to forgetting the first polynomial, applied to `sdc`.
pub fn extend_left(sdc: &SubdividedComposite, poly: &Polynomial) -> Result<LeftExtension> {
    let m = sdc.n();
    if poly.tgt() != &sdc.start {
        return Err(Error::NotComposable("polynomial does not end where the composite starts".into()));
    }
    let corner = pullback(&sdc.q1, &poly.p3)?;
    // f_i: C_{i2} -> Y_i and g_i: C_{i1} -> C_{i-1,2}.
    let mut f_maps = vec![corner.proj1.clone()];
    let mut dpbs = Vec::with_capacity(m);
    for i in 1..=m {
        let d = dist_pullback(&sdc.q2s[i - 1], &f_maps[i - 1])?;
        f_maps.push(d.r.clone());
        dpbs.push(d);
    }
    let g0 = corner.proj2.clone();
    let mut levels = vec![None; m + 2];
    let mut q2s = vec![None; m + 1];
    let mut links: Vec<Option<FinFn>> = vec![None; m + 1];
    levels[m + 1] = Some(f_maps[m].dom().clone());
    if m >= 1 {
        levels[m] = Some(dpbs[m - 1].upper.clone());
        q2s[m] = Some(dpbs[m - 1].q.clone());
        links[m] = Some(FinFn::identity(&dpbs[m - 1].upper));
    }
    // k_{j+1}: W_{j+1} -> C_{j2}.
    let down = |j: usize, links: &[Option<FinFn>]| -> Result<FinFn> {
        if j == m {
            Ok(FinFn::identity(f_maps[m].dom()))
        } else {
            compose_fn(&dpbs[j].p, links[j + 1].as_ref().unwrap())
        }
    };
    let mut squares = vec![None; m.max(1)];
    let first = m.saturating_sub(1);
    for j in (0..=first).rev() {
        let k = down(j, &links)?;
        let sq = if j == 0 {
            pullback(&compose_fn(&g0, &k)?, &poly.p2)?
        } else {
            pullback(&k, &dpbs[j - 1].q)?
        };
        levels[j] = Some(sq.apex.clone());
        q2s[j] = Some(sq.proj1.clone());
        links[j] = Some(sq.proj2.clone());
        squares[j] = Some(sq);
    }
    let links: Vec<FinFn> = links.into_iter().map(Option::unwrap).collect();
    let wrapped: Vec<Option<FinFn>> = links.iter().cloned().map(Some).collect();
    let mut eps = Vec::with_capacity(m + 1);
    for (k, fk) in f_maps.iter().enumerate().take(m + 1) {
        eps.push(compose_fn(fk, &down(k, &wrapped)?)?);
    }
    let k1 = down(0, &wrapped)?;
    let mut rs = vec![links[0].clone()];
    let mut ss = vec![compose_fn(&g0, &k1)?];
    for k in 1..=m {
        rs.push(compose_fn(&sdc.rs[k - 1], &eps[k - 1])?);
        ss.push(compose_fn(&sdc.ss[k - 1], &eps[k])?);
    }
    let mut over = vec![poly.clone()];
    over.extend(sdc.over.iter().cloned());
    let result = SubdividedComposite {
        start: poly.src().clone(),
        over,
        levels: levels.into_iter().map(Option::unwrap).collect(),
        q1: compose_fn(&poly.p1, &links[0])?,
        q2s: q2s.into_iter().map(Option::unwrap).collect(),
        q3: compose_fn(&sdc.q3, &f_maps[m])?,
        rs,
        ss,
    };
    let counit = SdcMorphism { src: result.res_first()?, tgt: sdc.clone(), ts: eps };
    Ok(LeftExtension {
        base: sdc.clone(),
        poly: poly.clone(),
        corner,
        dpbs,
        squares: squares.into_iter().map(Option::unwrap).collect(),
        result,
        counit,
    })
}

impl LeftExtension {
    /// Given `S'` over the extended sequence and `t: res_0(S') -> base`, the
    /// unique `t': S' -> base · p_1` with `counit ∘ res_0(t') = t`.
    pub fn mediate(&self, s: &SubdividedComposite, t: &SdcMorphism) -> Result<SdcMorphism> {
        let m = self.base.n();
        if s.over != self.result.over || t.tgt != self.base {
            return Err(Error::NotComposable("cone does not fit the extension".into()));
        }
        let mut u = self.corner.mediate(&t.ts[0], &s.ss[0])?;
        let mut v = vec![None; m + 1];
        for (i, slot) in v.iter_mut().enumerate().skip(1) {
            let (vi, ui) = self.dpbs[i - 1].mediate(&u, &s.q2s[i], &t.ts[i])?;
            *slot = Some(vi);
            u = ui;
        }
        let mut ts = vec![None; m + 2];
        ts[m + 1] = Some(u);
        if m >= 1 {
            ts[m] = v[m].clone();
        }
        let first = m.saturating_sub(1);
        for j in (0..=first).rev() {
            let up = compose_fn(ts[j + 1].as_ref().unwrap(), &s.q2s[j])?;
            let side = if j == 0 { s.rs[0].clone() } else { v[j].clone().unwrap() };
            ts[j] = Some(self.squares[j].mediate(&up, &side)?);
        }
        SdcMorphism::new(s.clone(), self.result.clone(), ts.into_iter().map(Option::unwrap).collect())
    }
}

/// The chosen terminal composite over a sequence, built by repeatedly
/// extending on the right, with the data to induce maps into it.
#[derive(Clone, Debug)]
pub struct TerminalSdc {
    pub start: FinSet,
    pub steps: Vec<RightExtension>,
}

impl TerminalSdc {
    pub fn build(start: &FinSet, seq: &[Polynomial]) -> Result<Self> {
        check_composable(start, seq)?;
        let mut cur = SubdividedComposite::identity_span(start);
        let mut steps = Vec::with_capacity(seq.len());
        for p in seq {
            let ext = extend_right(p, &cur)?;
            cur = ext.result.clone();
            steps.push(ext);
        }
        Ok(TerminalSdc { start: start.clone(), steps })
    }

    pub fn sdc(&self) -> SubdividedComposite {
        self.steps.last().map_or_else(|| SubdividedComposite::identity_span(&self.start), |s| s.result.clone())
    }

    /// The unique morphism from `s` into the terminal composite.
    pub fn mediate(&self, s: &SubdividedComposite) -> Result<SdcMorphism> {
        if s.over.len() != self.steps.len() || s.start != self.start {
            return Err(Error::NotComposable("composite lies over a different sequence".into()));
        }
        let mut chain = vec![s.clone()];
        for _ in 0..self.steps.len() {
            let next = chain.last().unwrap().res_last()?;
            chain.push(next);
        }
        let bottom = chain.pop().unwrap();
        if bottom.q1 != bottom.q3 {
            return Err(Error::NoMediator("endospan legs differ; no map into the identity span".into()));
        }
        let mut t = SdcMorphism::new(bottom.clone(), SubdividedComposite::identity_span(&self.start), vec![bottom.q1])?;
        for (step, src) in self.steps.iter().zip(chain.iter().rev()) {
            t = step.mediate(src, &t)?;
        }
        Ok(t)
    }
}

/// The same terminal composite built by extending on the left instead.
#[derive(Clone, Debug)]
pub struct LeftTerminalSdc {
    pub end: FinSet,
    /// Innermost first: `steps[0]` adds the last polynomial.
    pub steps: Vec<LeftExtension>,
}

impl LeftTerminalSdc {
    pub fn build(start: &FinSet, seq: &[Polynomial]) -> Result<Self> {
        check_composable(start, seq)?;
        let end = end_of(start, seq).clone();
        let mut cur = SubdividedComposite::identity_span(&end);
        let mut steps = Vec::with_capacity(seq.len());
        for p in seq.iter().rev() {
            let ext = extend_left(&cur, p)?;
            cur = ext.result.clone();
            steps.push(ext);
        }
        Ok(LeftTerminalSdc { end, steps })
    }

    pub fn sdc(&self) -> SubdividedComposite {
        self.steps.last().map_or_else(|| SubdividedComposite::identity_span(&self.end), |s| s.result.clone())
    }

    pub fn mediate(&self, s: &SubdividedComposite) -> Result<SdcMorphism> {
        if s.over.len() != self.steps.len() || s.end() != &self.end {
            return Err(Error::NotComposable("composite lies over a different sequence".into()));
        }
        let mut chain = vec![s.clone()];
        for _ in 0..self.steps.len() {
            let next = chain.last().unwrap().res_first()?;
            chain.push(next);
        }
        let bottom = chain.pop().unwrap();
        if bottom.q1 != bottom.q3 {
            return Err(Error::NoMediator("endospan legs differ; no map into the identity span".into()));
        }
        let mut t = SdcMorphism::new(bottom.clone(), SubdividedComposite::identity_span(&self.end), vec![bottom.q1])?;
        for (step, src) in self.steps.iter().zip(chain.iter().rev()) {
            t = step.mediate(src, &t)?;
        }
        Ok(t)
    }
}

/// The chosen terminal composite over `seq`, starting at `start`.
pub fn terminal_sdc(start: &FinSet, seq: &[Polynomial]) -> Result<SubdividedComposite> {
    Ok(TerminalSdc::build(start, seq)?.sdc())
}

/// `p_n ∘ ... ∘ p_1`, the associated polynomial of the terminal composite.
pub fn compose_seq(start: &FinSet, seq: &[Polynomial]) -> Result<Polynomial> {
    Ok(terminal_sdc(start, seq)?.associated_polynomial())
}

/// `q ∘ p` through the general construction, without shortcuts.
pub fn compose2_general(q: &Polynomial, p: &Polynomial) -> Result<Polynomial> {
    compose_seq(p.src(), &[p.clone(), q.clone()])
}

/// `q ∘ p`. Composites with `lft f` on the left or `rgt g` on the right use
/// the closed forms `(p1, p2, f∘p3)` and `(g∘q1, q2, q3)`.
pub fn compose2(q: &Polynomial, p: &Polynomial) -> Result<Polynomial> {
    if p.tgt() != q.src() {
        return Err(Error::NotComposable("target of p differs from source of q".into()));
    }
    if q.is_lft() {
        return Ok(Polynomial { p1: p.p1.clone(), p2: p.p2.clone(), p3: compose_fn(&q.p3, &p.p3)? });
    }
    if p.is_rgt() {
        return Ok(Polynomial { p1: compose_fn(&p.p1, &q.p1)?, p2: q.p2.clone(), p3: q.p3.clone() });
    }
    compose2_general(q, p)
}

/// Splices `inner` into position `j` of `outer`, where the polynomial at `j`
/// is exactly the associated polynomial of `inner`.
pub fn refine(outer: &SubdividedComposite, j: usize, inner: &SubdividedComposite) -> Result<SubdividedComposite> {
    if j >= outer.n() || outer.over[j] != inner.associated_polynomial() {
        return Err(Error::NotComposable("inner composite does not match the polynomial it replaces".into()));
    }
    let k = inner.n();
    let top = &outer.levels[j + 1];
    let s_j = &outer.ss[j];
    // Composite q2 from inner level i up to the last inner level.
    let mut to_last = vec![FinFn::identity(&inner.levels[k]); k + 1];
    for i in (0..k).rev() {
        to_last[i] = compose_fn(&to_last[i + 1], &inner.q2s[i])?;
    }
    // V_i with maps phi_i: V_i -> inner level i and pi_i: V_i -> top.
    let mut vs = vec![outer.levels[j].clone()];
    let mut phis = vec![outer.rs[j].clone()];
    let mut pis = vec![outer.q2s[j].clone()];
    let mut links = Vec::with_capacity(k);
    for i in 1..=k {
        if i == k {
            links.push(pis[i - 1].clone());
            vs.push(top.clone());
            phis.push(s_j.clone());
            pis.push(FinFn::identity(top));
        } else {
            let sq = pullback(s_j, &to_last[i])?;
            let link = sq.mediate(&pis[i - 1], &compose_fn(&inner.q2s[i - 1], &phis[i - 1])?)?;
            links.push(link);
            vs.push(sq.apex.clone());
            phis.push(sq.proj2.clone());
            pis.push(sq.proj1.clone());
        }
    }
    let mut over = outer.over[..j].to_vec();
    over.extend(inner.over.iter().cloned());
    over.extend(outer.over[j + 1..].iter().cloned());
    let mut levels = outer.levels[..j].to_vec();
    levels.extend(vs.iter().cloned());
    levels.extend(outer.levels[j + 2..].iter().cloned());
    let mut q2s = outer.q2s[..j].to_vec();
    q2s.extend(links);
    q2s.extend(outer.q2s[j + 1..].iter().cloned());
    let mut rs = outer.rs[..j].to_vec();
    let mut ss = outer.ss[..j].to_vec();
    for i in 0..k {
        rs.push(compose_fn(&inner.rs[i], &phis[i])?);
        ss.push(compose_fn(&inner.ss[i], &phis[i + 1])?);
    }
    rs.extend(outer.rs[j + 1..].iter().cloned());
    ss.extend(outer.ss[j + 1..].iter().cloned());
    let out = SubdividedComposite { start: outer.start.clone(), over, levels, q1: outer.q1.clone(), q2s, q3: outer.q3.clone(), rs, ss };
    Ok(out)
}

/// The coherence isomorphism `r ∘ (q ∘ p) -> (r ∘ q) ∘ p`.
pub fn associator(r: &Polynomial, q: &Polynomial, p: &Polynomial) -> Result<CartesianMorphism> {
    let term = TerminalSdc::build(p.src(), &[p.clone(), q.clone(), r.clone()])?;
    associator_via(|s| term.mediate(s), r, q, p)
}

/// The associator computed through the left-built terminal composite, an
/// independent second route to the same isomorphism.
pub fn associator_left_route(r: &Polynomial, q: &Polynomial, p: &Polynomial) -> Result<CartesianMorphism> {
    let term = LeftTerminalSdc::build(p.src(), &[p.clone(), q.clone(), r.clone()])?;
    associator_via(|s| term.mediate(s), r, q, p)
}

fn associator_via(
    into_terminal: impl Fn(&SubdividedComposite) -> Result<SdcMorphism>,
    r: &Polynomial,
    q: &Polynomial,
    p: &Polynomial,
) -> Result<CartesianMorphism> {
    let x = p.src();
    let qp = compose2(q, p)?;
    let rq = compose2(r, q)?;
    let s_a = refine(&terminal_sdc(x, &[qp, r.clone()])?, 0, &terminal_sdc(x, &[p.clone(), q.clone()])?)?;
    let s_b = refine(&terminal_sdc(x, &[p.clone(), rq])?, 1, &terminal_sdc(q.src(), &[q.clone(), r.clone()])?)?;
    let t_a = into_terminal(&s_a)?;
    let t_b = into_terminal(&s_b)?;
    let back = t_b.inverse().ok_or_else(|| Error::NoMediator("comparison with the terminal is not invertible".into()))?;
    let iso = t_a.then(&back)?.associated();
    if mutation::is_active(Mutant::SwapCartesianComponents) {
        return Ok(CartesianMorphism::new_unchecked(iso.src, iso.tgt, iso.f1, iso.f0));
    }
    Ok(iso)
}

/// Replaces the polynomial at position `i` of a composite by the target of
/// a cartesian morphism out of it, post-composing `r_i` and `s_i`.
pub fn push_along(sdc: &SubdividedComposite, i: usize, phi: &CartesianMorphism) -> Result<SubdividedComposite> {
    if i >= sdc.n() || sdc.over[i] != phi.src {
        return Err(Error::NotComposable("morphism does not start at the polynomial it replaces".into()));
    }
    let mut out = sdc.clone();
    out.over[i] = phi.tgt.clone();
    out.rs[i] = compose_fn(&phi.f0, &sdc.rs[i])?;
    out.ss[i] = compose_fn(&phi.f1, &sdc.ss[i])?;
    Ok(out)
}

/// The cartesian morphism `ass(seq) -> ass(seq')` obtained by applying `phi`
/// at position `i` of the composable sequence.
pub fn whisker(start: &FinSet, seq: &[Polynomial], i: usize, phi: &CartesianMorphism) -> Result<CartesianMorphism> {
    let here = terminal_sdc(start, seq)?;
    let mut seq2 = seq.to_vec();
    seq2[i] = phi.tgt.clone();
    let there = TerminalSdc::build(start, &seq2)?;
    let t = there.mediate(&push_along(&here, i, phi)?)?;
    Ok(t.associated())
}

/// `phi ∘ p: m ∘ p -> m' ∘ p`.
pub fn whisker_right(phi: &CartesianMorphism, p: &Polynomial) -> Result<CartesianMorphism> {
    whisker(p.src(), &[p.clone(), phi.src.clone()], 1, phi)
}

/// `q ∘ phi: q ∘ m -> q ∘ m'`.
pub fn whisker_left(q: &Polynomial, phi: &CartesianMorphism) -> Result<CartesianMorphism> {
    whisker(phi.src.src(), &[phi.src.clone(), q.clone()], 0, phi)
}

/// The unit `1_X -> rgt f ∘ lft f`, the diagonal into the kernel pair.
pub fn lft_rgt_unit(f: &FinFn) -> Result<CartesianMorphism> {
    let x = f.dom();
    let tgt = compose2(&Polynomial::rgt(f), &Polynomial::lft(f))?;
    let id = FinFn::identity(x);
    let sq = pullback(f, f)?;
    let diag = sq.mediate(&id, &id)?;
    let diag = FinFn::from_indices(x.clone(), tgt.mid_src().clone(), diag.images().to_vec())
        .map_err(|_| Error::NoMediator("kernel pair does not match the composite".into()))?;
    CartesianMorphism::new(Polynomial::identity(x), tgt, diag.clone(), diag)
}

/// The counit `lft f ∘ rgt f -> 1_Y`, given by `(f, f)`.
pub fn lft_rgt_counit(f: &FinFn) -> Result<CartesianMorphism> {
    let src = compose2(&Polynomial::lft(f), &Polynomial::rgt(f))?;
    CartesianMorphism::new(src, Polynomial::identity(f.cod()), f.clone(), f.clone())
}

/// The pullback of `a: p -> r` and `b: q -> r` in the hom category, formed
/// componentwise. Returns the projections to `p` and `q`.
pub fn hom_pullback(a: &CartesianMorphism, b: &CartesianMorphism) -> Result<(CartesianMorphism, CartesianMorphism)> {
    if a.tgt != b.tgt {
        return Err(Error::NotComposable("cospan legs have different targets".into()));
    }
    let (p, q) = (&a.src, &b.src);
    let mids = pullback(&a.f0, &b.f0)?;
    let tops = pullback(&a.f1, &b.f1)?;
    let u = compose_fn(&p.p2, &mids.proj1)?;
    let v = compose_fn(&q.p2, &mids.proj2)?;
    let middle = tops.mediate(&u, &v)?;
    let apex = mk_poly(compose_fn(&p.p1, &mids.proj1)?, middle, compose_fn(&p.p3, &tops.proj1)?)?;
    let to_p = CartesianMorphism::new(apex.clone(), p.clone(), mids.proj1.clone(), tops.proj1.clone())?;
    let to_q = CartesianMorphism::new(apex, q.clone(), mids.proj2.clone(), tops.proj2.clone())?;
    Ok((to_p, to_q))
}

/// Every cartesian morphism `p -> q`, by brute force over `f1` with `f0`
/// then forced by the pullback condition. Meant for tiny instances.
pub fn enumerate_cartesian(p: &Polynomial, q: &Polynomial) -> Result<Vec<CartesianMorphism>> {
    use crate::slices::{enumerate_slice_mors, product_indices};
    if p.src() != q.src() || p.tgt() != q.tgt() {
        return Ok(Vec::new());
    }
    let p_fibers = p.p2.fibers();
    let q_fibers = q.p2.fibers();
    let mut out = Vec::new();
    'f1: for f1 in enumerate_slice_mors(&hom_project(p, Side::Right), &hom_project(q, Side::Right))? {
        let f1 = f1.mediating;
        // On each fiber of p2, f0 is a bijection onto the matching fiber of
        // q2 that respects the maps to X.
        let mut options: Vec<Vec<Vec<usize>>> = Vec::with_capacity(p_fibers.len());
        for (b, pf) in p_fibers.iter().enumerate() {
            let qf = &q_fibers[f1.at(b)];
            if pf.len() != qf.len() {
                continue 'f1;
            }
            let mut found = Vec::new();
            fiber_bijections(p, q, pf, qf, &mut Vec::new(), &mut found);
            if found.is_empty() {
                continue 'f1;
            }
            options.push(found);
        }
        for choice in product_indices(&options.iter().map(Vec::len).collect::<Vec<_>>()) {
            let mut images = vec![0; p.mid_src().len()];
            for ((&c, opts), pf) in choice.iter().zip(&options).zip(&p_fibers) {
                for (&a, &a2) in pf.iter().zip(&opts[c]) {
                    images[a] = a2;
                }
            }
            let f0 = FinFn::from_indices(p.mid_src().clone(), q.mid_src().clone(), images)?;
            out.push(CartesianMorphism::new_unchecked(p.clone(), q.clone(), f0, f1.clone()));
        }
    }
    Ok(out)
}

fn fiber_bijections(p: &Polynomial, q: &Polynomial, pf: &[usize], qf: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == pf.len() {
        out.push(cur.clone());
        return;
    }
    let a = pf[cur.len()];
    for &a2 in qf {
        if !cur.contains(&a2) && q.p1.at(a2) == p.p1.at(a) {
            cur.push(a2);
            fiber_bijections(p, q, pf, qf, cur, out);
            cur.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset::{mk_finset, Element};

    fn set(tokens: &[&str]) -> FinSet {
        mk_finset(tokens).unwrap()
    }

    fn func(dom: &FinSet, cod: &FinSet, pairs: &[(&str, &str)]) -> FinFn {
        FinFn::new(dom.clone(), cod.clone(), pairs.iter().map(|(a, b)| (Element::atom(a), Element::atom(b)))).unwrap()
    }

    /// `x -> x^2 + 1` as a diagram over one variable.
    fn square_plus_one() -> Polynomial {
        let x = set(&["x"]);
        let a = set(&["u0", "u1"]);
        let b = set(&["m0", "m1"]);
        let y = set(&["y"]);
        mk_poly(
            func(&a, &x, &[("u0", "x"), ("u1", "x")]),
            func(&a, &b, &[("u0", "m0"), ("u1", "m0")]),
            func(&b, &y, &[("m0", "y"), ("m1", "y")]),
        )
        .unwrap()
    }

    fn poly_on(x: &FinSet) -> Polynomial {
        let a = set(&["a1", "a2", "a3"]);
        let b = set(&["b1", "b2"]);
        let toks: Vec<&str> = x.iter().map(|e| e.as_atom().unwrap()).collect();
        let p1 = func(&a, x, &[("a1", toks[0]), ("a2", toks[0]), ("a3", toks[toks.len() - 1])]);
        let p2 = func(&a, &b, &[("a1", "b1"), ("a2", "b1"), ("a3", "b2")]);
        let p3 = func(&b, x, &[("b1", toks[0]), ("b2", toks[0])]);
        mk_poly(p1, p2, p3).unwrap()
    }

    #[test]
    fn polynomial_validation() {
        let x = set(&["x1", "x2"]);
        let p = poly_on(&x);
        assert!(mk_poly(p.p1.clone(), p.p2.clone(), p.p3.clone()).is_ok());
        assert!(matches!(mk_poly(p.p3.clone(), p.p2.clone(), p.p3.clone()), Err(Error::IllFormedPolynomial(_))));
        let id = Polynomial::identity(&x);
        assert_eq!(embed_map(&FinFn::identity(&x), Side::Left), id);
        let f = p.p3.clone();
        assert_eq!(embed_map(&f, Side::Left).p3, f);
        assert_eq!(embed_map(&f, Side::Right).p1, f);
    }

    #[test]
    fn small_terminals() {
        let x = set(&["x1", "x2"]);
        let p = poly_on(&x);
        let t0 = terminal_sdc(&x, &[]).unwrap();
        assert_eq!(t0.associated_polynomial(), Polynomial::identity(&x));
        let t1 = terminal_sdc(&x, std::slice::from_ref(&p)).unwrap();
        assert_eq!(t1, SubdividedComposite::of_polynomial(&p));
        assert_eq!(t1.associated_polynomial(), p);
        let t2 = terminal_sdc(&x, &[p.clone(), p.clone()]).unwrap();
        t2.validate().unwrap();
        assert_eq!(t2.n(), 2);
    }

    #[test]
    fn strict_units_and_easy_composites() {
        let x = set(&["x1", "x2"]);
        let p = poly_on(&x);
        let id = Polynomial::identity(&x);
        assert_eq!(compose2(&id, &p).unwrap(), p);
        assert_eq!(compose2(&p, &id).unwrap(), p);
        assert_eq!(compose2_general(&id, &p).unwrap(), p);
        assert_eq!(compose2_general(&p, &id).unwrap(), p);
        let f = func(&x, &set(&["z"]), &[("x1", "z"), ("x2", "z")]);
        let l = compose2(&Polynomial::lft(&f), &p).unwrap();
        assert_eq!(l, Polynomial { p1: p.p1.clone(), p2: p.p2.clone(), p3: compose_fn(&f, &p.p3).unwrap() });
        assert_eq!(compose2_general(&Polynomial::lft(&f), &p).unwrap(), l);
        let g = f.clone();
        let r = compose2(&p, &Polynomial::rgt(&g)).unwrap();
        assert_eq!(compose2_general(&p, &Polynomial::rgt(&g)).unwrap(), r);
    }

    #[test]
    fn composing_one_variable_polynomials_substitutes() {
        // (x^2 + 1) ∘ (x^2 + 1) = x^4 + 2x^2 + 2: five monomials, eight usages.
        let p = square_plus_one();
        let y_to_x = |q: &Polynomial| {
            let rename = func(q.tgt(), &set(&["x"]), &[("y", "x")]);
            Polynomial { p3: compose_fn(&rename, &q.p3).unwrap(), ..q.clone() }
        };
        let p = y_to_x(&p);
        let pp = compose2(&p, &p).unwrap();
        assert_eq!(pp.mid_tgt().len(), 5);
        assert_eq!(pp.mid_src().len(), 8);
    }

    #[test]
    fn left_and_right_extensions_agree() {
        let x = set(&["x1", "x2"]);
        let p = poly_on(&x);
        let q = square_plus_one();
        let x1 = set(&["x"]);
        let q = Polynomial { p3: compose_fn(&func(q.tgt(), &x1, &[("y", "x")]), &q.p3).unwrap(), ..q };
        let seqs: Vec<(FinSet, Vec<Polynomial>)> = vec![
            (x.clone(), vec![p.clone(), p.clone()]),
            (x.clone(), vec![p.clone(), p.clone(), p.clone()]),
            (x1.clone(), vec![q.clone(), q.clone()]),
            (x.clone(), vec![]),
        ];
        for (start, seq) in seqs {
            let right = TerminalSdc::build(&start, &seq).unwrap();
            let left = LeftTerminalSdc::build(&start, &seq).unwrap();
            left.sdc().validate().unwrap();
            let there = right.mediate(&left.sdc()).unwrap();
            let back = left.mediate(&right.sdc()).unwrap();
            assert!(there.is_iso());
            assert_eq!(there.then(&back).unwrap(), SdcMorphism::identity(&left.sdc()));
        }
        // A single left extension of the identity composite reproduces p.
        let e = extend_left(&SubdividedComposite::identity_span(&x), &p).unwrap();
        assert_eq!(e.result, SubdividedComposite::of_polynomial(&p));
    }

    #[test]
    fn terminal_mediation_is_identity_on_itself() {
        let x = set(&["x1", "x2"]);
        let p = poly_on(&x);
        let t = TerminalSdc::build(&x, &[p.clone(), p.clone(), p]).unwrap();
        let s = t.sdc();
        assert_eq!(t.mediate(&s).unwrap(), SdcMorphism::identity(&s));
    }

    #[test]
    fn associator_is_cartesian_iso() {
        let x = set(&["x1", "x2"]);
        let p = poly_on(&x);
        let a = associator(&p, &p, &p).unwrap();
        assert!(is_cartesian(&a));
        assert!(a.is_invertible());
        assert_eq!(a.src, compose2(&p, &compose2(&p, &p).unwrap()).unwrap());
        assert_eq!(a.tgt, compose2(&compose2(&p, &p).unwrap(), &p).unwrap());
        assert_eq!(associator_left_route(&p, &p, &p).unwrap(), a);
        let id = Polynomial::identity(&x);
        assert_eq!(associator(&id, &id, &id).unwrap(), CartesianMorphism::identity(&id));
    }

    #[test]
    fn cartesian_rejects_non_pullback() {
        // Two parallel spans 1 <- 2 -> 1 and 1 <- 1 -> 1 with the evident map.
        let one = set(&["o"]);
        let two = set(&["a", "b"]);
        let p = mk_poly(
            func(&two, &one, &[("a", "o"), ("b", "o")]),
            func(&two, &one, &[("a", "o"), ("b", "o")]),
            FinFn::identity(&one),
        )
        .unwrap();
        let q = Polynomial::identity(&one);
        let m = CartesianMorphism::new_unchecked(p.clone(), q, p.p1.clone(), FinFn::identity(&one));
        assert!(!is_cartesian(&m));
        assert!(is_cartesian(&CartesianMorphism::identity(&p)));
    }

    #[test]
    fn hom_pullback_along_identity() {
        let x = set(&["x1", "x2"]);
        let p = poly_on(&x);
        let id = CartesianMorphism::identity(&p);
        let (to_p, _) = hom_pullback(&id, &id).unwrap();
        assert_eq!(to_p.src, p);
        let autos = enumerate_cartesian(&p, &p).unwrap();
        assert_eq!(autos.len(), 2);
        for a in &autos {
            let (l, _) = hom_pullback(a, &id).unwrap();
            assert_eq!(l.src, p);
        }
    }

    #[test]
    fn lft_rgt_structure() {
        let x = set(&["x1", "x2", "x3"]);
        let y = set(&["y1", "y2"]);
        let f = func(&x, &y, &[("x1", "y1"), ("x2", "y1"), ("x3", "y2")]);
        let eta = lft_rgt_unit(&f).unwrap();
        assert_eq!(eta.tgt.mid_src().len(), 5);
        let eps = lft_rgt_counit(&f).unwrap();
        assert!(eps.src.is_span());
        let l = Polynomial::lft(&f);
        let r = Polynomial::rgt(&f);
        let tri = whisker_left(&l, &eta)
            .unwrap()
            .then(&associator(&l, &r, &l).unwrap())
            .unwrap()
            .then(&whisker_right(&eps, &l).unwrap())
            .unwrap();
        assert_eq!(tri, CartesianMorphism::identity(&l));
    }

    #[test]
    fn projections_natural() {
        let x = set(&["x1", "x2"]);
        let p = poly_on(&x);
        let z = set(&["z"]);
        let f = func(&x, &z, &[("x1", "z"), ("x2", "z")]);
        let lp = compose2(&Polynomial::lft(&f), &p).unwrap();
        assert_eq!(hom_project(&lp, Side::Right), crate::slices::sigma(&f, &hom_project(&p, Side::Right)).unwrap());
        assert_eq!(hom_project(&lp, Side::Left), hom_project(&p, Side::Left));
        let g = f.clone();
        let pr = compose2(&p, &Polynomial::rgt(&g)).unwrap();
        assert_eq!(hom_project(&pr, Side::Left), crate::slices::sigma(&g, &hom_project(&p, Side::Left)).unwrap());
        assert_eq!(hom_project(&pr, Side::Right), hom_project(&p, Side::Right));
    }
}
