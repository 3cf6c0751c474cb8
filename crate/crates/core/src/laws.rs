//! The law-checking harness: every named law draws seeded random instances
//! and checks one family of properties on each.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::time::Instant;

use rand::Rng as _;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extension::{
    coherence_component, coherence_component_left_route, eval_mor, eval_obj, eval_through_span, nat_component,
};
use crate::finset::{check_pullback, compose_fn, pullback, Element, FinFn, FinSet, PullbackSquare};
use crate::gen::{self, Rng};
use crate::json::{
    cartesian_to_json, element_to_json, fn_to_json, poly_from_json, poly_to_json, slice_to_json,
};
use crate::poly::{
    associator, associator_left_route, compose2, compose2_general, compose_seq, enumerate_cartesian, extend_left,
    extend_right, hom_project, hom_pullback, is_cartesian, lft_rgt_counit, lft_rgt_unit, terminal_sdc,
    whisker_left, whisker_right, CartesianMorphism, Polynomial, SdcMorphism, Side, SubdividedComposite,
};
use crate::slices::{
    check_dpb_terminal, delta_component, delta_mor, delta_square, dist_pullback, enumerate_slice_mors, induce_sections,
    left_bc_component, pi, pi_mor, product_indices, right_bc_component, sigma, BcSquare, DistPB, SectionSeed,
    SliceMor, SliceObj,
};
use crate::symbolic::{decode, encode, eval_sym, eval_via_extension, parse_poly, substitute, Assignment};

/// Size and count parameters for a law run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceGenConfig {
    pub seed: u64,
    pub max_set_size: usize,
    pub cases: usize,
}

impl Default for InstanceGenConfig {
    fn default() -> Self {
        InstanceGenConfig { seed: 42, max_set_size: 3, cases: 100 }
    }
}

/// A failing check, with enough of the instance to reproduce it.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub reason: String,
    pub counterexample: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { reason: e.to_string(), counterexample: Value::Null }
    }
}

type Check = std::result::Result<(), Failure>;

/// Counts of notable situations a case exercised, such as non-terminal
/// candidates.
pub type Tally = BTreeMap<&'static str, usize>;

trait Context<T> {
    fn ctx(self, v: &Value) -> std::result::Result<T, Failure>;
}

impl<T> Context<T> for Result<T> {
    fn ctx(self, v: &Value) -> std::result::Result<T, Failure> {
        self.map_err(|e| Failure { reason: e.to_string(), counterexample: v.clone() })
    }
}

fn ensure(cond: bool, reason: impl Into<String>, ce: &Value) -> Check {
    if cond {
        Ok(())
    } else {
        Err(Failure { reason: reason.into(), counterexample: ce.clone() })
    }
}

type CaseFn = fn(&mut Rng, usize, &mut Tally) -> Check;

/// A named law with the module it belongs to.
pub struct Law {
    pub name: &'static str,
    pub module: &'static str,
    pub statement: &'static str,
    run: CaseFn,
}

pub const LAWS: &[Law] = &[
    Law { name: "adjunctions", module: "slices", statement: "Σ⊣Δ and Δ⊣Π hom-set bijections; Beck–Chevalley cells invertible iff the square is a pullback; Π preserves the terminal object and pullbacks", run: law_adjunctions },
    Law { name: "delta-criterion", module: "slices", statement: "a pullback around (f, g) is terminal iff δ is invertible on every small slice", run: law_delta_criterion },
    Law { name: "comp-cancel", module: "slices", statement: "pullback pasting, and composition/cancellation of distributivity pullbacks", run: law_comp_cancel },
    Law { name: "cube", module: "slices", statement: "in the cube shape, the two side regions are pullbacks iff the top region is terminal", run: law_cube },
    Law { name: "sections", module: "slices", statement: "compatible section triples are determined by either end", run: law_sections },
    Law { name: "units", module: "poly", statement: "identity polynomials are strict units and identity pullbacks are normalized", run: law_units },
    Law { name: "associativity", module: "poly", statement: "the associator is an invertible cartesian morphism, equal along both terminal constructions", run: law_associativity },
    Law { name: "pentagon", module: "poly", statement: "the pentagon of associators commutes exactly", run: law_pentagon },
    Law { name: "counits", module: "poly", statement: "left and right extensions are couniversal: maps into them exist, are unique and factor through the counit", run: law_counits },
    Law { name: "spans", module: "poly", statement: "composition of spans is composition by pullback, exactly", run: law_spans },
    Law { name: "lft-rgt", module: "poly", statement: "lft f ⊣ rgt f with diagonal unit and (f, f) counit satisfies both triangle identities", run: law_lft_rgt },
    Law { name: "projections", module: "poly", statement: "composing with lft and rgt acts on hom projections by Σ, exactly", run: law_projections },
    Law { name: "hom-pullback", module: "poly", statement: "componentwise pullbacks are pullbacks of cartesian morphisms, detected by the 1-component, and preserved by evaluation", run: law_hom_pullback },
    Law { name: "functor-laws", module: "extension", statement: "evaluation preserves identities and composition", run: law_functor_laws },
    Law { name: "coherence", module: "extension", statement: "π is a natural bijection, satisfies the hexagon, and agrees along both constructions", run: law_coherence },
    Law { name: "cartesian-image", module: "extension", statement: "naturality squares of a cartesian morphism's components are pullbacks", run: law_cartesian_image },
    Law { name: "faithful", module: "extension", statement: "distinct parallel cartesian morphisms differ at 1_X or at q1", run: law_faithful },
    Law { name: "conservative", module: "extension", statement: "components bijective at the probes iff the morphism is invertible", run: law_conservative },
    Law { name: "oracle-agreement", module: "symbolic", statement: "evaluating the diagram counts what arithmetic evaluation computes", run: law_oracle_agreement },
    Law { name: "roundtrip", module: "symbolic", statement: "decode∘encode, text and JSON forms round-trip", run: law_roundtrip },
    Law { name: "substitution", module: "symbolic", statement: "composing diagrams substitutes polynomials", run: law_substitution },
];

pub fn find_law(name: &str) -> Option<&'static Law> {
    LAWS.iter().find(|l| l.name == name)
}

/// One failing case of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseFailure {
    pub case: usize,
    pub reason: String,
    pub counterexample: Value,
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub law: String,
    pub cases: usize,
    pub failures: Vec<CaseFailure>,
    pub tally: BTreeMap<String, usize>,
    pub wall_ms: u128,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// The report as JSON; `wall_ms` is the only nondeterministic field.
    pub fn to_json(&self) -> Value {
        json!({
            "law": self.law,
            "cases": self.cases,
            "failures": self.failures.iter().map(|f| json!({
                "case": f.case,
                "reason": f.reason,
                "counterexample": f.counterexample,
            })).collect::<Vec<_>>(),
            "tally": self.tally,
            "wall_ms": self.wall_ms as u64,
        })
    }
}

/// How cases of a run are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

fn run_case(law: &Law, cfg: &InstanceGenConfig, case: usize) -> (Option<CaseFailure>, Tally) {
    let mut rng = gen::case_rng(cfg.seed, law.name, case);
    let mut tally = Tally::new();
    let outcome = (law.run)(&mut rng, cfg.max_set_size.max(1), &mut tally);
    let failure = outcome.err().map(|f| CaseFailure {
        case,
        reason: f.reason,
        counterexample: if f.counterexample.is_null() {
            json!({ "seed": cfg.seed, "case": case, "size": cfg.max_set_size })
        } else {
            f.counterexample
        },
    });
    (failure, tally)
}

fn run_cases(law: &Law, cfg: &InstanceGenConfig, exec: Exec) -> Vec<(Option<CaseFailure>, Tally)> {
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..cfg.cases).into_par_iter().map(|i| run_case(law, cfg, i)).collect()
        }
        _ => (0..cfg.cases).map(|i| run_case(law, cfg, i)).collect(),
    }
}

/// Runs one law; results are in case order whatever the schedule.
pub fn run_law_with(law: &Law, cfg: &InstanceGenConfig, exec: Exec) -> LawReport {
    let start = Instant::now();
    let results = run_cases(law, cfg, exec);
    let mut tally = BTreeMap::new();
    let mut failures = Vec::new();
    for (f, t) in results {
        failures.extend(f);
        for (k, v) in t {
            *tally.entry(k.to_string()).or_insert(0) += v;
        }
    }
    LawReport { law: law.name.to_string(), cases: cfg.cases, failures, tally, wall_ms: start.elapsed().as_millis() }
}

pub fn run_law(name: &str, cfg: &InstanceGenConfig) -> Option<LawReport> {
    find_law(name).map(|l| run_law_with(l, cfg, Exec::default()))
}

pub fn run_all(cfg: &InstanceGenConfig) -> Vec<LawReport> {
    LAWS.iter().map(|l| run_law_with(l, cfg, Exec::default())).collect()
}

// Shared helpers.

const ENUM_LIMIT: u128 = 4096;

fn bump(t: &mut Tally, key: &'static str) {
    *t.entry(key).or_insert(0) += 1;
}

fn square(apex: &FinSet, proj1: &FinFn, proj2: &FinFn, leg1: &FinFn, leg2: &FinFn) -> PullbackSquare {
    PullbackSquare { apex: apex.clone(), proj1: proj1.clone(), proj2: proj2.clone(), leg1: leg1.clone(), leg2: leg2.clone() }
}

fn is_pb(sq: &PullbackSquare) -> Result<bool> {
    check_pullback(sq)
}

/// The slice over `base` with the given fiber sizes.
fn slice_with_fibers(base: &FinSet, sizes: &[usize]) -> SliceObj {
    let images: Vec<usize> = sizes.iter().enumerate().flat_map(|(b, &k)| std::iter::repeat_n(b, k)).collect();
    let carrier = FinSet::numbered("k", images.len());
    SliceObj::new(FinFn::from_indices(carrier, base.clone(), images).expect("indices in range"))
}

/// Every slice over `base` with carrier of at most `total` elements, up to
/// isomorphism.
fn small_family(base: &FinSet, total: usize) -> Vec<SliceObj> {
    fn go(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            go(n, left - k, cur, out);
            cur.pop();
        }
    }
    let mut vecs = Vec::new();
    go(base.len(), total, &mut Vec::new(), &mut vecs);
    vecs.iter().map(|v| slice_with_fibers(base, v)).collect()
}

fn count_product(sizes: impl IntoIterator<Item = usize>) -> u128 {
    sizes.into_iter().fold(1u128, |acc, k| acc.saturating_mul(k as u128))
}

fn dpb_json(d: &DistPB) -> Value {
    json!({
        "f": fn_to_json(&d.around_f),
        "g": fn_to_json(&d.around_g),
        "p": fn_to_json(&d.p),
        "q": fn_to_json(&d.q),
        "r": fn_to_json(&d.r),
    })
}

/// Removes one element of the lower object together with its fiber.
fn drop_lower(d: &DistPB, y0: usize) -> Result<DistPB> {
    let keep_x: Vec<usize> = (0..d.upper.len()).filter(|&x| d.q.at(x) != y0).collect();
    let keep_y: Vec<usize> = (0..d.lower.len()).filter(|&y| y != y0).collect();
    let upper = FinSet::new(keep_x.iter().map(|&x| d.upper.get(x).clone()))?;
    let lower = FinSet::new(keep_y.iter().map(|&y| d.lower.get(y).clone()))?;
    let pos = |y: usize| keep_y.binary_search(&y).expect("kept");
    let p = FinFn::from_indices(upper.clone(), d.p.cod().clone(), keep_x.iter().map(|&x| d.p.at(x)).collect())?;
    let q = FinFn::from_indices(upper, lower.clone(), keep_x.iter().map(|&x| pos(d.q.at(x))).collect())?;
    let r = FinFn::from_indices(lower, d.r.cod().clone(), keep_y.iter().map(|&y| d.r.at(y)).collect())?;
    DistPB::new(d.around_f.clone(), d.around_g.clone(), p, q, r)
}

/// Adds a second copy of one element of the lower object and its fiber.
fn duplicate_lower(d: &DistPB, y0: usize) -> Result<DistPB> {
    let tag = |e: &Element| Element::pair(Element::atom("dup"), e.clone());
    let fiber = d.q.fiber(y0);
    let ty = tag(d.lower.get(y0));
    let upper = FinSet::new(d.upper.iter().cloned().chain(fiber.iter().map(|&x| tag(d.upper.get(x)))))?;
    let lower = FinSet::new(d.lower.iter().cloned().chain([ty.clone()]))?;
    let extra = |f: &FinFn, img: &dyn Fn(usize) -> Element| -> Vec<(Element, Element)> {
        fiber.iter().map(|&x| (tag(d.upper.get(x)), img(f.at(x)))).collect()
    };
    let graph = |f: &FinFn| f.graph().map(|(a, b)| (a.clone(), b.clone())).collect::<Vec<_>>();
    let mut pg = graph(&d.p);
    pg.extend(extra(&d.p, &|i| d.p.cod().get(i).clone()));
    let mut qg = graph(&d.q);
    qg.extend(extra(&d.q, &|_| ty.clone()));
    let mut rg = graph(&d.r);
    rg.push((ty.clone(), d.r.cod().get(d.r.at(y0)).clone()));
    let p = FinFn::new(upper.clone(), d.p.cod().clone(), pg)?;
    let q = FinFn::new(upper, lower.clone(), qg)?;
    let r = FinFn::new(lower, d.r.cod().clone(), rg)?;
    DistPB::new(d.around_f.clone(), d.around_g.clone(), p, q, r)
}

/// The canonical dpb followed by its non-terminal variants.
fn dpb_variants(rng: &mut Rng, d: &DistPB) -> Result<Vec<(DistPB, bool)>> {
    let mut out = vec![(d.clone(), true)];
    if !d.lower.is_empty() {
        let y0 = rng.gen_range(0..d.lower.len());
        out.push((drop_lower(d, y0)?, false));
        out.push((duplicate_lower(d, y0)?, false));
    }
    Ok(out)
}

// slices

fn law_adjunctions(rng: &mut Rng, s: usize, tally: &mut Tally) -> Check {
    let a = gen::set_between(rng, "a", 1, s);
    let b = gen::set_between(rng, "b", 1, s);
    let f = gen::func(rng, &a, &b);
    let x = gen::slice(rng, &a, s);
    let y = gen::slice(rng, &b, s);
    let ce = json!({ "f": fn_to_json(&f), "x": slice_to_json(&x), "y": slice_to_json(&y) });

    // Σ_f ⊣ Δ_f.
    let sx = sigma(&f, &x).ctx(&ce)?;
    let sq = delta_square(&f, &y).ctx(&ce)?;
    let dy = SliceObj::new(sq.proj2.clone());
    let y_fib = y.fiber_sizes();
    let dy_fib = dy.fiber_sizes();
    let left = count_product(sx.arrow.images().iter().map(|&b| y_fib[b]));
    let right = count_product(x.arrow.images().iter().map(|&a| dy_fib[a]));
    ensure(left == right, format!("|Hom(Σx, y)| = {left} but |Hom(x, Δy)| = {right}"), &ce)?;
    let transpose = |h: &SliceMor| -> Result<SliceMor> {
        SliceMor::new(x.clone(), dy.clone(), sq.mediate(&h.mediating, &x.arrow)?)
    };
    let untranspose = |t: &SliceMor| -> Result<SliceMor> {
        SliceMor::new(sx.clone(), y.clone(), compose_fn(&sq.proj1, &t.mediating)?)
    };
    if left <= ENUM_LIMIT {
        let homs = enumerate_slice_mors(&sx, &y).ctx(&ce)?;
        let other = enumerate_slice_mors(&x, &dy).ctx(&ce)?;
        ensure(homs.len() as u128 == left && other.len() as u128 == right, "enumeration disagrees with counting", &ce)?;
        let mut images = homs.iter().map(&transpose).collect::<Result<Vec<_>>>().ctx(&ce)?;
        for (h, t) in homs.iter().zip(&images) {
            ensure(&untranspose(t).ctx(&ce)? == h, "Σ⊣Δ transposes do not round-trip", &ce)?;
        }
        images.sort_by(|u, v| u.mediating.images().cmp(v.mediating.images()));
        images.dedup();
        ensure(images.len() == other.len(), "Σ⊣Δ transpose is not injective", &ce)?;
        bump(tally, "exhaustive hom-sets");
    } else {
        for _ in 0..16 {
            if let Some(h) = gen::slice_mor(rng, &sx, &y) {
                ensure(untranspose(&transpose(&h).ctx(&ce)?).ctx(&ce)? == h, "Σ⊣Δ transposes do not round-trip", &ce)?;
            }
        }
    }

    // Δ_f ⊣ Π_f with y over B and x over A.
    let px = dist_pullback(&f, &x.arrow).ctx(&ce)?;
    let pxs = SliceObj::new(px.r.clone());
    ensure(pi(&f, &x).ctx(&ce)? == pxs, "pi differs from the chosen dpb", &ce)?;
    let idx: HashMap<(usize, usize), usize> =
        (0..sq.apex.len()).map(|e| ((sq.proj1.at(e), sq.proj2.at(e)), e)).collect();
    let x_fib = x.fiber_sizes();
    let px_fib = pxs.fiber_sizes();
    let left = count_product(dy.arrow.images().iter().map(|&a| x_fib[a]));
    let right = count_product(y.arrow.images().iter().map(|&b| px_fib[b]));
    ensure(left == right, format!("|Hom(Δy, x)| = {left} but |Hom(y, Πx)| = {right}"), &ce)?;
    let transpose = |k: &SliceMor| -> Result<SliceMor> {
        let images = (0..y.carrier().len())
            .map(|c| {
                let bb = y.arrow.at(c);
                let sec: Vec<usize> = px.f_fiber(bb)?.iter().map(|&aa| k.mediating.at(idx[&(c, aa)])).collect();
                px.lookup_section(bb, &sec)?.ok_or_else(|| Error::NoMediator("section missing from Π".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        SliceMor::new(y.clone(), pxs.clone(), FinFn::from_indices(y.carrier().clone(), pxs.carrier().clone(), images)?)
    };
    let untranspose = |u: &SliceMor| -> Result<SliceMor> {
        let images = (0..sq.apex.len())
            .map(|e| {
                let (c, aa) = (sq.proj1.at(e), sq.proj2.at(e));
                let fib = px.f_fiber(y.arrow.at(c))?;
                let at = fib.iter().position(|&t| t == aa).expect("a lies over b");
                Ok(px.section(u.mediating.at(c))?[at])
            })
            .collect::<Result<Vec<_>>>()?;
        SliceMor::new(dy.clone(), x.clone(), FinFn::from_indices(sq.apex.clone(), x.carrier().clone(), images)?)
    };
    if left <= ENUM_LIMIT {
        let homs = enumerate_slice_mors(&dy, &x).ctx(&ce)?;
        let other = enumerate_slice_mors(&y, &pxs).ctx(&ce)?;
        ensure(homs.len() as u128 == left && other.len() as u128 == right, "enumeration disagrees with counting", &ce)?;
        let mut images = homs.iter().map(&transpose).collect::<Result<Vec<_>>>().ctx(&ce)?;
        for (k, u) in homs.iter().zip(&images) {
            ensure(&untranspose(u).ctx(&ce)? == k, "Δ⊣Π transposes do not round-trip", &ce)?;
        }
        images.sort_by(|u, v| u.mediating.images().cmp(v.mediating.images()));
        images.dedup();
        ensure(images.len() == other.len(), "Δ⊣Π transpose is not injective", &ce)?;
    } else {
        for _ in 0..16 {
            if let Some(k) = gen::slice_mor(rng, &dy, &x) {
                ensure(untranspose(&transpose(&k).ctx(&ce)?).ctx(&ce)? == k, "Δ⊣Π transposes do not round-trip", &ce)?;
            }
        }
    }

    // Π_f preserves the terminal object and pullbacks.
    ensure(pi(&f, &SliceObj::terminal(&a)).ctx(&ce)? == SliceObj::terminal(&b), "Π_f(1) is not 1", &ce)?;
    let [pr1, pr2, h1, h2] = slice_pullback(rng, &x, s).ctx(&ce)?;
    let [m1, m2, k1, k2] = [&pr1, &pr2, &h1, &h2].map(|h| pi_mor(&f, h));
    let (m1, m2, k1, k2) = (m1.ctx(&ce)?, m2.ctx(&ce)?, k1.ctx(&ce)?, k2.ctx(&ce)?);
    let image = square(m1.src.carrier(), &m1.mediating, &m2.mediating, &k1.mediating, &k2.mediating);
    ensure(is_pb(&image).ctx(&ce)?, "Π_f does not preserve a pullback", &ce)?;

    // Beck–Chevalley cells.
    let (bc, expect_pb) = bc_square(rng, s).ctx(&ce)?;
    let ce = json!({ "f": fn_to_json(&bc.f), "h": fn_to_json(&bc.h), "g": fn_to_json(&bc.g), "k": fn_to_json(&bc.k) });
    let is_pullback = bc.is_pullback().ctx(&ce)?;
    ensure(is_pullback == expect_pb, "generated square has the wrong pullback status", &ce)?;
    let alpha_ok = left_bc_component(&bc, &SliceObj::terminal(bc.h.cod())).ctx(&ce)?.is_bijective();
    ensure(alpha_ok == is_pullback, "left Beck–Chevalley cell at 1 misjudges the square", &ce)?;
    let mut beta_ok = true;
    // A perturbed square is seen by a probe with one fiber of two and the
    // rest singletons, so the family must reach |B| + 1.
    for probe in small_family(bc.k.dom(), bc.k.dom().len() + 1) {
        beta_ok &= right_bc_component(&bc, &probe).ctx(&ce)?.is_bijective();
    }
    ensure(beta_ok == is_pullback, "right Beck–Chevalley cells misjudge the square", &ce)?;
    if !is_pullback {
        bump(tally, "non-pullback squares");
    }
    Ok(())
}

/// A pullback square of slices `[π1, π2, h1, h2]` with `h1: x -> x0`.
fn slice_pullback(rng: &mut Rng, x: &SliceObj, s: usize) -> Result<[SliceMor; 4]> {
    let h1 = gen::slice_mor_from(rng, x, s.min(2));
    let x2 = gen::slice(rng, x.base(), s);
    let h2 = gen::slice_mor(rng, &x2, &h1.tgt).unwrap_or_else(|| h1.clone());
    let pb = pullback(&h1.mediating, &h2.mediating)?;
    let apex = SliceObj::new(compose_fn(&h1.src.arrow, &pb.proj1)?);
    let pr1 = SliceMor::new(apex.clone(), h1.src.clone(), pb.proj1.clone())?;
    let pr2 = SliceMor::new(apex, h2.src.clone(), pb.proj2.clone())?;
    Ok([pr1, pr2, h1, h2])
}

/// Whether the images of a slice pullback square form a pullback.
fn image_is_pullback(sq: &[SliceMor; 4]) -> Result<bool> {
    let [m1, m2, k1, k2] = sq;
    is_pb(&square(m1.src.carrier(), &m1.mediating, &m2.mediating, &k1.mediating, &k2.mediating))
}

/// A commuting square, a pullback or (when possible) a perturbed one.
fn bc_square(rng: &mut Rng, s: usize) -> Result<(BcSquare, bool)> {
    let bset = gen::set_between(rng, "b", 1, s);
    let cset = gen::set_between(rng, "c", 1, s);
    let dset = gen::set_between(rng, "d", 1, s);
    let k = gen::func(rng, &bset, &dset);
    let g = gen::func(rng, &cset, &dset);
    let pb = pullback(&k, &g)?;
    if pb.apex.is_empty() || rng.gen_bool(0.5) {
        return Ok((BcSquare::new(pb.proj1, pb.proj2, g, k)?, true));
    }
    let e = rng.gen_range(0..pb.apex.len());
    let (apex, f_img, h_img): (Vec<Element>, Vec<usize>, Vec<usize>) = if rng.gen_bool(0.5) {
        let keep: Vec<usize> = (0..pb.apex.len()).filter(|&i| i != e).collect();
        (
            keep.iter().map(|&i| pb.apex.get(i).clone()).collect(),
            keep.iter().map(|&i| pb.proj1.at(i)).collect(),
            keep.iter().map(|&i| pb.proj2.at(i)).collect(),
        )
    } else {
        let mut apex: Vec<Element> = pb.apex.iter().cloned().collect();
        apex.push(Element::pair(Element::atom("dup"), pb.apex.get(e).clone()));
        let mut f_img = pb.proj1.images().to_vec();
        f_img.push(pb.proj1.at(e));
        let mut h_img = pb.proj2.images().to_vec();
        h_img.push(pb.proj2.at(e));
        (apex, f_img, h_img)
    };
    // The new elements sort after the old ones, so positions are preserved.
    let aset = FinSet::new(apex)?;
    let f = FinFn::from_indices(aset.clone(), bset, f_img)?;
    let h = FinFn::from_indices(aset, cset, h_img)?;
    Ok((BcSquare::new(f, h, g, k)?, false))
}

fn law_delta_criterion(rng: &mut Rng, s: usize, tally: &mut Tally) -> Check {
    let a = gen::set_between(rng, "a", 1, s);
    let b = gen::set_between(rng, "b", 1, s);
    let z = gen::set(rng, "z", s);
    let f = gen::func(rng, &a, &b);
    let g = gen::func(rng, &z, &a);
    let d = dist_pullback(&f, &g).ctx(&json!({ "f": fn_to_json(&f), "g": fn_to_json(&g) }))?;
    let family = small_family(&z, 3);
    for (cand, canonical) in dpb_variants(rng, &d).ctx(&dpb_json(&d))? {
        let ce = dpb_json(&cand);
        let terminal = check_dpb_terminal(&cand).ctx(&ce)?;
        ensure(terminal == canonical, if canonical { "the chosen dpb is not terminal" } else { "a perturbed candidate passed as terminal" }, &ce)?;
        let at_one = delta_component(&cand, &SliceObj::terminal(&z)).ctx(&ce)?.is_bijective();
        ensure(at_one == terminal, "δ at 1_Z disagrees with terminality", &ce)?;
        let mut all = true;
        for probe in &family {
            all &= delta_component(&cand, probe).ctx(&ce)?.is_bijective();
        }
        ensure(all == terminal, "δ on small slices disagrees with terminality", &ce)?;
        if !canonical {
            bump(tally, "non-terminal candidates");
        }
    }
    Ok(())
}

fn law_comp_cancel(rng: &mut Rng, s: usize, tally: &mut Tally) -> Check {
    // Pullback pasting: right square a pullback, left square varied.
    let cset = gen::set_between(rng, "c", 1, s);
    let fset = gen::set_between(rng, "f", 1, s);
    let eset = gen::set_between(rng, "e", 1, s);
    let dset = gen::set_between(rng, "d", 1, s);
    let cf = gen::func(rng, &cset, &fset);
    let ef = gen::func(rng, &eset, &fset);
    let de = gen::func(rng, &dset, &eset);
    let ce = json!({ "C->F": fn_to_json(&cf), "E->F": fn_to_json(&ef), "D->E": fn_to_json(&de) });
    let right = pullback(&cf, &ef).ctx(&ce)?;
    let left = pullback(&right.proj2, &de).ctx(&ce)?;
    let as_dpb = DistPB::new(FinFn::identity(&eset), right.proj2.clone(), left.proj1.clone(), left.proj2.clone(), de.clone())
        .ctx(&ce)?;
    let variants = if left.apex.is_empty() { vec![(as_dpb, true)] } else { perturb_apex(rng, &as_dpb).ctx(&ce)? };
    for (v, expect) in variants {
        // v.p: A -> B, v.q: A -> D.
        let front = square(&v.upper, &v.p, &v.q, &right.proj2, &de);
        let comp = square(&v.upper, &compose_fn(&right.proj1, &v.p).ctx(&ce)?, &v.q, &cf, &compose_fn(&ef, &de).ctx(&ce)?);
        let front_pb = is_pb(&front).ctx(&ce)?;
        ensure(front_pb == expect, "perturbed front square has the wrong status", &ce)?;
        ensure(front_pb == is_pb(&comp).ctx(&ce)?, "pasting: front and composite squares disagree", &ce)?;
    }

    // Composition/cancellation of distributivity pullbacks.
    let bset = gen::set(rng, "b", s);
    let xset = gen::set_between(rng, "x", 1, s);
    let yset = gen::set_between(rng, "y", 1, s);
    let zset = gen::set_between(rng, "z", 1, s);
    let h = gen::func(rng, &bset, &xset);
    let f = gen::func(rng, &xset, &yset);
    let g = gen::func(rng, &yset, &zset);
    let ce = json!({ "h": fn_to_json(&h), "f": fn_to_json(&f), "g": fn_to_json(&g) });
    let dl = dist_pullback(&f, &h).ctx(&ce)?;
    let dr = dist_pullback(&g, &dl.r).ctx(&ce)?;
    for (cand, canonical) in dpb_variants(rng, &dr).ctx(&ce)? {
        let top = pullback(&cand.p, &dl.q).ctx(&ce)?;
        let composite = DistPB::new(
            compose_fn(&g, &f).ctx(&ce)?,
            h.clone(),
            compose_fn(&dl.p, &top.proj2).ctx(&ce)?,
            compose_fn(&cand.q, &top.proj1).ctx(&ce)?,
            cand.r.clone(),
        )
        .ctx(&ce)?;
        let right_t = check_dpb_terminal(&cand).ctx(&ce)?;
        let comp_t = check_dpb_terminal(&composite).ctx(&ce)?;
        ensure(right_t == canonical, "perturbed right dpb has the wrong status", &ce)?;
        ensure(right_t == comp_t, "right dpb and composite disagree on terminality", &ce)?;
        if !canonical {
            bump(tally, "non-terminal candidates");
        }
    }
    Ok(())
}

/// A pullback square packaged as a pullback around `(1, leg)`, followed by
/// copies with one apex element dropped or doubled.
fn perturb_apex(rng: &mut Rng, d: &DistPB) -> Result<Vec<(DistPB, bool)>> {
    let e = rng.gen_range(0..d.upper.len());
    let keep: Vec<usize> = (0..d.upper.len()).filter(|&i| i != e).collect();
    let dropped = FinSet::new(keep.iter().map(|&i| d.upper.get(i).clone()))?;
    let drop = DistPB::new(
        d.around_f.clone(),
        d.around_g.clone(),
        FinFn::from_indices(dropped.clone(), d.p.cod().clone(), keep.iter().map(|&i| d.p.at(i)).collect())?,
        FinFn::from_indices(dropped.clone(), d.q.cod().clone(), keep.iter().map(|&i| d.q.at(i)).collect())?,
        d.r.clone(),
    )?;
    let mut elems: Vec<Element> = d.upper.iter().cloned().collect();
    elems.push(Element::pair(Element::atom("dup"), d.upper.get(e).clone()));
    let doubled = FinSet::new(elems)?;
    let mut pi = d.p.images().to_vec();
    pi.push(d.p.at(e));
    let mut qi = d.q.images().to_vec();
    qi.push(d.q.at(e));
    let dup = DistPB::new(
        d.around_f.clone(),
        d.around_g.clone(),
        FinFn::from_indices(doubled.clone(), d.p.cod().clone(), pi)?,
        FinFn::from_indices(doubled, d.q.cod().clone(), qi)?,
        d.r.clone(),
    )?;
    Ok(vec![(d.clone(), true), (drop, false), (dup, false)])
}

fn law_cube(rng: &mut Rng, s: usize, tally: &mut Tally) -> Check {
    let c2 = gen::set_between(rng, "c", 1, s);
    let c3 = gen::set(rng, "w", s);
    let d2 = gen::set_between(rng, "d", 1, s);
    let b2 = gen::set(rng, "b", s);
    let g2 = gen::func(rng, &c2, &d2);
    let d4 = gen::func(rng, &c3, &c2);
    let k2 = gen::func(rng, &b2, &d2);
    let ce = json!({ "g2": fn_to_json(&g2), "d4": fn_to_json(&d4), "k2": fn_to_json(&k2) });
    let bottom = dist_pullback(&g2, &d4).ctx(&ce)?;
    let (d3, g1, d6) = (&bottom.p, &bottom.q, &bottom.r);
    let inner = pullback(&k2, &g2).ctx(&ce)?;
    let (f2, h2) = (&inner.proj1, &inner.proj2);
    let left = pullback(h2, &d4).ctx(&ce)?;
    let (d2, h3) = (&left.proj1, &left.proj2);

    // From region (3) to regions (1) and (2).
    let region3 = dist_pullback(f2, d2).ctx(&ce)?;
    for (cand, canonical) in dpb_variants(rng, &region3).ctx(&ce)? {
        let (d1, f1, d5) = (&cand.p, &cand.q, &cand.r);
        let (h1, k1) = bottom
            .mediate(&compose_fn(h3, d1).ctx(&ce)?, f1, &compose_fn(&k2, d5).ctx(&ce)?)
            .ctx(&ce)?;
        let top = square(&cand.upper, f1, &h1, &k1, g1);
        ensure(is_pb(&top).ctx(&ce)?, "the top face is not a pullback", &ce)?;
        let r1 = is_pb(&square(&cand.upper, d1, &h1, h3, d3)).ctx(&ce)?;
        let r2 = is_pb(&square(&cand.lower, d5, &k1, &k2, d6)).ctx(&ce)?;
        let terminal = check_dpb_terminal(&cand).ctx(&ce)?;
        ensure(terminal == canonical, "perturbed region (3) has the wrong status", &ce)?;
        ensure((r1 && r2) == terminal, "side regions disagree with terminality of the top region", &ce)?;
        if !canonical {
            bump(tally, "non-terminal candidates");
        }
    }

    // From pullback regions (1) and (2) to a terminal region (3).
    let b1 = pullback(d6, &k2).ctx(&ce)?;
    let a1 = pullback(h3, d3).ctx(&ce)?;
    let f1 = b1
        .mediate(
            &compose_fn(g1, &a1.proj2).ctx(&ce)?,
            &compose_fn(f2, &compose_fn(d2, &a1.proj1).ctx(&ce)?).ctx(&ce)?,
        )
        .ctx(&ce)?;
    let region3 = DistPB::new(f2.clone(), d2.clone(), a1.proj1.clone(), f1, b1.proj2.clone()).ctx(&ce)?;
    ensure(check_dpb_terminal(&region3).ctx(&ce)?, "pullback side regions did not give a terminal top", &ce)?;
    Ok(())
}

fn law_sections(rng: &mut Rng, s: usize, tally: &mut Tally) -> Check {
    let a = gen::set_between(rng, "a", 1, s);
    let b = gen::set_between(rng, "b", 1, s);
    let f = gen::func(rng, &a, &b);
    // Make g surjective so that sections exist.
    let extra = gen::set(rng, "z", s);
    let mut images: Vec<usize> = (0..a.len()).collect();
    images.extend((0..extra.len()).map(|_| rng.gen_range(0..a.len())));
    let zset = FinSet::numbered("z", images.len());
    let g = FinFn::from_indices(zset, a.clone(), images).expect("indices in range");
    let ce = json!({ "f": fn_to_json(&f), "g": fn_to_json(&g) });
    let d = dist_pullback(&f, &g).ctx(&ce)?;
    let check = |t: &crate::slices::Sections| -> std::result::Result<bool, Error> {
        Ok(compose_fn(&g, &t.s1)?.is_identity()
            && compose_fn(&compose_fn(&g, &d.p)?, &t.s2)?.is_identity()
            && compose_fn(&d.r, &t.s3)?.is_identity()
            && compose_fn(&d.p, &t.s2)? == t.s1
            && compose_fn(&d.q, &t.s2)? == compose_fn(&t.s3, &f)?)
    };
    let g_fibers = g.fibers();
    let r_fibers = d.r.fibers();
    let n_g = count_product(g_fibers.iter().map(Vec::len));
    let n_r = count_product(r_fibers.iter().map(Vec::len));
    ensure(n_g == n_r, format!("{n_g} sections of g but {n_r} of r"), &ce)?;
    if n_g > ENUM_LIMIT {
        return Ok(());
    }
    let mut from_r = Vec::new();
    for choice in product_indices(&r_fibers.iter().map(Vec::len).collect::<Vec<_>>()) {
        let images: Vec<usize> = choice.iter().zip(&r_fibers).map(|(&c, fib)| fib[c]).collect();
        let s3 = FinFn::from_indices(b.clone(), d.lower.clone(), images).ctx(&ce)?;
        let t = induce_sections(&d, &SectionSeed::OfR(s3)).ctx(&ce)?;
        ensure(check(&t).ctx(&ce)?, "triple induced from s3 is not natural", &ce)?;
        from_r.push(t);
    }
    let mut s1s: Vec<Vec<usize>> = Vec::new();
    for choice in product_indices(&g_fibers.iter().map(Vec::len).collect::<Vec<_>>()) {
        let images: Vec<usize> = choice.iter().zip(&g_fibers).map(|(&c, fib)| fib[c]).collect();
        let s1 = FinFn::from_indices(a.clone(), g.dom().clone(), images).ctx(&ce)?;
        let t = induce_sections(&d, &SectionSeed::OfG(s1.clone())).ctx(&ce)?;
        ensure(check(&t).ctx(&ce)? && t.s1 == s1, "triple induced from s1 is not natural", &ce)?;
        let back = induce_sections(&d, &SectionSeed::OfR(t.s3.clone())).ctx(&ce)?;
        ensure(back == t, "s1 and s3 determine different triples", &ce)?;
        s1s.push(t.s1.images().to_vec());
    }
    let mut from_r_s1: Vec<Vec<usize>> = from_r.iter().map(|t| t.s1.images().to_vec()).collect();
    from_r_s1.sort();
    s1s.sort();
    ensure(from_r_s1 == s1s, "the two seedings give different sets of triples", &ce)?;
    if g.dom().len() > a.len() {
        let bad = FinFn::from_indices(a.clone(), g.dom().clone(), vec![a.len(); a.len()]).ctx(&ce)?;
        let ok = !compose_fn(&g, &bad).ctx(&ce)?.is_identity();
        if ok {
            ensure(
                matches!(induce_sections(&d, &SectionSeed::OfG(bad)), Err(Error::NotASection(_))),
                "a non-section seed was accepted",
                &ce,
            )?;
            bump(tally, "rejected seeds");
        }
    }
    Ok(())
}

// poly

fn law_units(rng: &mut Rng, s: usize, _tally: &mut Tally) -> Check {
    let x = gen::set_between(rng, "x", 1, s);
    let y = gen::set_between(rng, "y", 1, s);
    let p = gen::poly(rng, &x, &y, s);
    let ce = json!({ "p": poly_to_json(&p) });
    let (ix, iy) = (Polynomial::identity(&x), Polynomial::identity(&y));
    ensure(compose2(&iy, &p).ctx(&ce)? == p, "1 ∘ p differs from p", &ce)?;
    ensure(compose2(&p, &ix).ctx(&ce)? == p, "p ∘ 1 differs from p", &ce)?;
    ensure(compose2_general(&iy, &p).ctx(&ce)? == p, "1 ∘ p differs from p without shortcuts", &ce)?;
    ensure(compose2_general(&p, &ix).ctx(&ce)? == p, "p ∘ 1 differs from p without shortcuts", &ce)?;
    ensure(compose_seq(&x, &[]).ctx(&ce)? == ix, "the empty composite is not the identity", &ce)?;
    ensure(compose_seq(&x, std::slice::from_ref(&p)).ctx(&ce)? == p, "the unary composite is not p", &ce)?;
    let sl = gen::slice(rng, &x, s);
    ensure(eval_obj(&ix, &sl).ctx(&ce)?.0 == sl, "the identity polynomial moves a slice", &ce)?;
    let pb = pullback(&p.p1, &FinFn::identity(&x)).ctx(&ce)?;
    ensure(pb.apex == *p.mid_src() && pb.proj1.is_identity() && pb.proj2 == p.p1, "pullback along an identity is not normalized", &ce)?;
    let pb = pullback(&FinFn::identity(&x), &p.p1).ctx(&ce)?;
    ensure(pb.apex == *p.mid_src() && pb.proj2.is_identity() && pb.proj1 == p.p1, "pullback of an identity is not normalized", &ce)?;
    Ok(())
}

fn law_associativity(rng: &mut Rng, s: usize, _tally: &mut Tally) -> Check {
    let (x, seq) = gen::chain(rng, 3, s);
    let (p, q, r) = (&seq[0], &seq[1], &seq[2]);
    let ce = json!({ "p": poly_to_json(p), "q": poly_to_json(q), "r": poly_to_json(r) });
    let a = associator(r, q, p).ctx(&ce)?;
    ensure(is_cartesian(&a), "the associator is not cartesian", &ce)?;
    ensure(a.is_invertible(), "the associator is not invertible", &ce)?;
    ensure(a.src == compose2(r, &compose2(q, p).ctx(&ce)?).ctx(&ce)?, "associator has the wrong source", &ce)?;
    ensure(a.tgt == compose2(&compose2(r, q).ctx(&ce)?, p).ctx(&ce)?, "associator has the wrong target", &ce)?;
    ensure(associator_left_route(r, q, p).ctx(&ce)? == a, "the two terminal constructions give different associators", &ce)?;
    let n = compose_seq(&x, &seq).ctx(&ce)?;
    ensure(
        n.mid_src().len() == a.src.mid_src().len() && n.mid_tgt().len() == a.src.mid_tgt().len(),
        "the ternary composite has a different size",
        &ce,
    )?;
    Ok(())
}

fn law_pentagon(rng: &mut Rng, s: usize, _tally: &mut Tally) -> Check {
    let (_, seq) = gen::chain(rng, 4, s.min(2));
    let (a, b, c, d) = (&seq[0], &seq[1], &seq[2], &seq[3]);
    let ce = json!({ "polys": seq.iter().map(poly_to_json).collect::<Vec<_>>() });
    let ba = compose2(b, a).ctx(&ce)?;
    let cb = compose2(c, b).ctx(&ce)?;
    let dc = compose2(d, c).ctx(&ce)?;
    let top = associator(d, c, &ba).ctx(&ce)?.then(&associator(&dc, b, a).ctx(&ce)?).ctx(&ce)?;
    let bottom = whisker_left(d, &associator(c, b, a).ctx(&ce)?)
        .ctx(&ce)?
        .then(&associator(d, &cb, a).ctx(&ce)?)
        .ctx(&ce)?
        .then(&whisker_right(&associator(d, c, b).ctx(&ce)?, a).ctx(&ce)?)
        .ctx(&ce)?;
    ensure(top == bottom, "the pentagon does not commute", &ce)
}

fn law_counits(rng: &mut Rng, s: usize, tally: &mut Tally) -> Check {
    let (x, seq) = gen::chain(rng, 2, s.min(2));
    let ce = json!({ "start": crate::json::set_to_json(&x), "polys": seq.iter().map(poly_to_json).collect::<Vec<_>>() });

    // Right extension of a random composite over the first polynomial.
    let (base, _) = gen::sdc_over(rng, &terminal_sdc(&x, &seq[..1]).ctx(&ce)?, s);
    let ext = extend_right(&seq[1], &base).ctx(&ce)?;
    ext.result.validate().ctx(&ce)?;
    ext.counit.validate().ctx(&ce)?;
    let (sp, phi) = gen::sdc_over(rng, &ext.result, s);
    let t = SdcMorphism::new(sp.res_last().ctx(&ce)?, ext.counit.src.clone(), phi[..2].to_vec())
        .ctx(&ce)?
        .then(&ext.counit)
        .ctx(&ce)?;
    let m = ext.mediate(&sp, &t).ctx(&ce)?;
    ensure(m.ts == phi, "right extension mediator differs from the known map", &ce)?;
    if let Some(k) = count_over(&sp, &ext.result, &ext.counit, &t, restrict_last) {
        bump(tally, "exhaustive searches");
        ensure(k == 1, "right extension mediator is not unique", &ce)?;
    }

    // Left extension of a random composite over the second polynomial.
    let (base, _) = gen::sdc_over(rng, &terminal_sdc(seq[0].tgt(), &seq[1..]).ctx(&ce)?, s);
    let ext = extend_left(&base, &seq[0]).ctx(&ce)?;
    ext.result.validate().ctx(&ce)?;
    ext.counit.validate().ctx(&ce)?;
    let (sp, phi) = gen::sdc_over(rng, &ext.result, s);
    let t = SdcMorphism::new(sp.res_first().ctx(&ce)?, ext.counit.src.clone(), phi[1..].to_vec())
        .ctx(&ce)?
        .then(&ext.counit)
        .ctx(&ce)?;
    let m = ext.mediate(&sp, &t).ctx(&ce)?;
    ensure(m.ts == phi, "left extension mediator differs from the known map", &ce)?;
    if let Some(k) = count_over(&sp, &ext.result, &ext.counit, &t, restrict_first) {
        bump(tally, "exhaustive searches");
        ensure(k == 1, "left extension mediator is not unique", &ce)?;
    }

    // Extending by an identity polynomial has an invertible counit.
    let id = Polynomial::identity(&x);
    let ext = extend_left(&base, &Polynomial::identity(seq[0].tgt())).ctx(&ce)?;
    ensure(ext.counit.is_iso(), "left extension by an identity has a non-invertible counit", &ce)?;
    let ext = extend_right(&id, &SubdividedComposite::identity_span(&x)).ctx(&ce)?;
    ensure(ext.counit.is_iso(), "right extension by an identity has a non-invertible counit", &ce)?;
    Ok(())
}

/// Morphisms `s -> t` whose restriction composed with `counit` is `target`.
fn count_over(
    s: &SubdividedComposite,
    t: &SubdividedComposite,
    counit: &SdcMorphism,
    target: &SdcMorphism,
    restrict: fn(&SdcMorphism) -> Option<SdcMorphism>,
) -> Option<usize> {
    let n = s.n();
    let mut options: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        options.push(
            (0..s.levels[i].len())
                .map(|y| (0..t.levels[i].len()).filter(|&w| level_ok(s, t, i, y, w)).collect())
                .collect(),
        );
    }
    let total = options.iter().fold(1u128, |acc, o| acc.saturating_mul(count_product(o.iter().map(Vec::len))));
    if total > ENUM_LIMIT {
        return None;
    }
    let mut count = 0;
    for choice in product_indices(&options.iter().flat_map(|o| o.iter().map(Vec::len)).collect::<Vec<_>>()) {
        let mut it = choice.into_iter();
        let ts: Option<Vec<FinFn>> = options
            .iter()
            .enumerate()
            .map(|(i, opts)| {
                let images = opts.iter().map(|o| o[it.next().unwrap()]).collect();
                FinFn::from_indices(s.levels[i].clone(), t.levels[i].clone(), images).ok()
            })
            .collect();
        let Some(ts) = ts else { continue };
        let cand = SdcMorphism { src: s.clone(), tgt: t.clone(), ts };
        if cand.validate().is_err() {
            continue;
        }
        if let Some(r) = restrict(&cand) {
            if r.then(counit).ok().as_ref() == Some(target) {
                count += 1;
            }
        }
    }
    Some(count)
}

fn level_ok(s: &SubdividedComposite, t: &SubdividedComposite, i: usize, y: usize, w: usize) -> bool {
    let n = s.n();
    (i > 0 || t.q1.at(w) == s.q1.at(y))
        && (i < n || t.q3.at(w) == s.q3.at(y))
        && (i == n || t.rs[i].at(w) == s.rs[i].at(y))
        && (i == 0 || t.ss[i - 1].at(w) == s.ss[i - 1].at(y))
}

fn restrict_last(m: &SdcMorphism) -> Option<SdcMorphism> {
    let n = m.ts.len() - 1;
    Some(SdcMorphism { src: m.src.res_last().ok()?, tgt: m.tgt.res_last().ok()?, ts: m.ts[..n].to_vec() })
}

fn restrict_first(m: &SdcMorphism) -> Option<SdcMorphism> {
    Some(SdcMorphism { src: m.src.res_first().ok()?, tgt: m.tgt.res_first().ok()?, ts: m.ts[1..].to_vec() })
}

fn law_spans(rng: &mut Rng, s: usize, _tally: &mut Tally) -> Check {
    let objs: Vec<FinSet> = (0..4).map(|i| gen::set_between(rng, &format!("o{i}_"), 1, s)).collect();
    let spans: Vec<Polynomial> = (0..3).map(|i| gen::span(rng, &objs[i], &objs[i + 1], s)).collect();
    let ce = json!({ "spans": spans.iter().map(poly_to_json).collect::<Vec<_>>() });
    let by_pullback = |u: &Polynomial, v: &Polynomial| -> Result<Polynomial> {
        let pb = pullback(&u.p3, &v.p1)?;
        Ok(Polynomial {
            p1: compose_fn(&u.p1, &pb.proj1)?,
            p2: FinFn::identity(&pb.apex),
            p3: compose_fn(&v.p3, &pb.proj2)?,
        })
    };
    let two = by_pullback(&spans[0], &spans[1]).ctx(&ce)?;
    ensure(compose2(&spans[1], &spans[0]).ctx(&ce)? == two, "binary span composite differs from the pullback", &ce)?;
    let three = by_pullback(&two, &spans[2]).ctx(&ce)?;
    let comp = compose_seq(&objs[0], &spans).ctx(&ce)?;
    ensure(comp.is_span(), "a composite of spans is not a span", &ce)?;
    ensure(comp == three, "ternary span composite differs from iterated pullbacks", &ce)?;
    let a = associator(&spans[2], &spans[1], &spans[0]).ctx(&ce)?;
    ensure(is_cartesian(&a) && a.is_invertible() && a.f0 == a.f1, "span associator is not a bijection of pair-sets", &ce)?;
    Ok(())
}

fn law_lft_rgt(rng: &mut Rng, s: usize, _tally: &mut Tally) -> Check {
    let n = s.clamp(1, 4);
    let x = gen::set_between(rng, "x", 1, n);
    let y = gen::set_between(rng, "y", 1, n);
    let f = gen::func(rng, &x, &y);
    let ce = json!({ "f": fn_to_json(&f) });
    let (l, r) = (Polynomial::lft(&f), Polynomial::rgt(&f));
    let eta = lft_rgt_unit(&f).ctx(&ce)?;
    let eps = lft_rgt_counit(&f).ctx(&ce)?;
    let first = whisker_left(&l, &eta)
        .ctx(&ce)?
        .then(&associator(&l, &r, &l).ctx(&ce)?)
        .ctx(&ce)?
        .then(&whisker_right(&eps, &l).ctx(&ce)?)
        .ctx(&ce)?;
    ensure(first == CartesianMorphism::identity(&l), "first triangle identity fails", &ce)?;
    let back = associator(&r, &l, &r).ctx(&ce)?.inverse().ok_or_else(|| Failure {
        reason: "associator not invertible".into(),
        counterexample: ce.clone(),
    })?;
    let second = whisker_right(&eta, &r)
        .ctx(&ce)?
        .then(&back)
        .ctx(&ce)?
        .then(&whisker_left(&r, &eps).ctx(&ce)?)
        .ctx(&ce)?;
    ensure(second == CartesianMorphism::identity(&r), "second triangle identity fails", &ce)
}

fn law_projections(rng: &mut Rng, s: usize, _tally: &mut Tally) -> Check {
    let x = gen::set_between(rng, "x", 1, s);
    let y = gen::set_between(rng, "y", 1, s);
    let z = gen::set_between(rng, "z", 1, s);
    let w = gen::set_between(rng, "w", 1, s);
    let p = gen::poly(rng, &x, &y, s);
    let f = gen::func(rng, &y, &z);
    let g = gen::func(rng, &x, &w);
    let ce = json!({ "p": poly_to_json(&p), "f": fn_to_json(&f), "g": fn_to_json(&g) });
    let lp = compose2(&Polynomial::lft(&f), &p).ctx(&ce)?;
    let pr = compose2(&p, &Polynomial::rgt(&g)).ctx(&ce)?;
    ensure(hom_project(&lp, Side::Right) == sigma(&f, &hom_project(&p, Side::Right)).ctx(&ce)?, "Σ_f r(p) differs from r(lft f ∘ p)", &ce)?;
    ensure(hom_project(&lp, Side::Left) == hom_project(&p, Side::Left), "l(p) differs from l(lft f ∘ p)", &ce)?;
    ensure(hom_project(&pr, Side::Left) == sigma(&g, &hom_project(&p, Side::Left)).ctx(&ce)?, "Σ_g l(p) differs from l(p ∘ rgt g)", &ce)?;
    ensure(hom_project(&pr, Side::Right) == hom_project(&p, Side::Right), "r(p) differs from r(p ∘ rgt g)", &ce)?;
    Ok(())
}

/// Doubles the middle of `m.src`, mapping both copies onto the original.
fn doubled(m: &CartesianMorphism) -> Result<CartesianMorphism> {
    let p = &m.src;
    let tag = |t: &str, e: &Element| Element::pair(Element::atom(t), e.clone());
    let copy = |set: &FinSet| FinSet::new(["l", "r"].iter().flat_map(|t| set.iter().map(move |e| tag(t, e))));
    let (a2, b2) = (copy(p.mid_src())?, copy(p.mid_tgt())?);
    let untag = |e: &Element| e.as_pair().expect("tagged").1.clone();
    let lift = |dom: &FinSet, cod: &FinSet, f: &FinFn, keep_tag: bool| {
        FinFn::from_map(dom.clone(), cod.clone(), |e| {
            let (t, inner) = e.as_pair().expect("tagged");
            let img = f.apply(inner).expect("in domain").clone();
            if keep_tag { Element::pair(t.clone(), img) } else { img }
        })
    };
    let src = Polynomial {
        p1: lift(&a2, p.src(), &p.p1, false)?,
        p2: lift(&a2, &b2, &p.p2, true)?,
        p3: lift(&b2, p.tgt(), &p.p3, false)?,
    };
    let f0 = FinFn::from_map(a2.clone(), m.tgt.mid_src().clone(), |e| m.f0.apply(&untag(e)).expect("in domain").clone())?;
    let f1 = FinFn::from_map(b2.clone(), m.tgt.mid_tgt().clone(), |e| m.f1.apply(&untag(e)).expect("in domain").clone())?;
    Ok(CartesianMorphism::new_unchecked(src, m.tgt.clone(), f0, f1))
}

/// Whether a commuting square of cartesian morphisms is a pullback, by
/// counting mediators for the given test cones. A mediator is a cartesian
/// morphism, so the count factors over the summands of the cone's source
/// into bijections on usage fibers.
fn hom_square_is_pullback(
    to_p: &CartesianMorphism,
    to_q: &CartesianMorphism,
    cones: &[(CartesianMorphism, CartesianMorphism)],
) -> bool {
    cones.iter().all(|(u, v)| mediator_count(to_p, to_q, u, v) == 1)
}

fn mediator_count(to_p: &CartesianMorphism, to_q: &CartesianMorphism, u: &CartesianMorphism, v: &CartesianMorphism) -> u128 {
    let (t, apex) = (&u.src, &to_p.src);
    let t_fibers = t.p2.fibers();
    let apex_fibers = apex.p2.fibers();
    let mut total: u128 = 1;
    for (b, tf) in t_fibers.iter().enumerate() {
        let mut here: u128 = 0;
        for (w, af) in apex_fibers.iter().enumerate() {
            if to_p.f1.at(w) != u.f1.at(b) || to_q.f1.at(w) != v.f1.at(b) || apex.p3.at(w) != t.p3.at(b) || af.len() != tf.len() {
                continue;
            }
            let allowed = |a: usize, a2: usize| {
                apex.p1.at(a2) == t.p1.at(a) && to_p.f0.at(a2) == u.f0.at(a) && to_q.f0.at(a2) == v.f0.at(a)
            };
            here += count_bijections(tf, af, &allowed, &mut vec![false; af.len()]);
        }
        total = total.saturating_mul(here);
    }
    total
}

fn count_bijections(from: &[usize], to: &[usize], allowed: &dyn Fn(usize, usize) -> bool, used: &mut Vec<bool>) -> u128 {
    let Some((&a, rest)) = from.split_first() else { return 1 };
    let mut n = 0;
    for (k, &a2) in to.iter().enumerate() {
        if !used[k] && allowed(a, a2) {
            used[k] = true;
            n += count_bijections(rest, to, allowed, used);
            used[k] = false;
        }
    }
    n
}

fn law_hom_pullback(rng: &mut Rng, s: usize, tally: &mut Tally) -> Check {
    let x = gen::set_between(rng, "x", 1, s);
    let y = gen::set_between(rng, "y", 1, s);
    let r = gen::poly(rng, &x, &y, s);
    let a = gen::cartesian_into(rng, &r, s);
    let b = gen::cartesian_into(rng, &r, s);
    let ce = json!({ "a": cartesian_to_json(&a), "b": cartesian_to_json(&b) });
    let (pa, pb) = hom_pullback(&a, &b).ctx(&ce)?;
    ensure(is_cartesian(&pa) && is_cartesian(&pb), "projections are not cartesian", &ce)?;
    let left = pa.then(&a).ctx(&ce)?;
    let right = pb.then(&b).ctx(&ce)?;
    ensure(left.f0 == right.f0 && left.f1 == right.f1, "the pullback square does not commute", &ce)?;
    let one_pb = |u: &CartesianMorphism, v: &CartesianMorphism| is_pb(&square(u.src.mid_tgt(), &u.f1, &v.f1, &a.f1, &b.f1));

    // Test cones: the apex itself and random cartesian maps into p and q.
    let mut cones = vec![(pa.clone(), pb.clone())];
    let u = gen::cartesian_into(rng, &a.src, s.min(2));
    for v in enumerate_cartesian(&u.src, &b.src).ctx(&ce)? {
        let (ua, vb) = (u.then(&a).ctx(&ce)?, v.then(&b).ctx(&ce)?);
        if ua.f0 == vb.f0 && ua.f1 == vb.f1 {
            cones.push((u.clone(), v));
        }
    }
    let brute = hom_square_is_pullback(&pa, &pb, &cones);
    ensure(brute, "brute force finds the computed square is not a pullback", &ce)?;
    ensure(one_pb(&pa, &pb).ctx(&ce)?, "the 1-component square is not a pullback", &ce)?;
    if !pa.src.mid_tgt().is_empty() {
        let d = doubled(&pa).ctx(&ce)?;
        let e = doubled(&pb).ctx(&ce)?;
        let e = CartesianMorphism::new_unchecked(d.src.clone(), e.tgt, e.f0, e.f1);
        ensure(is_cartesian(&d) && is_cartesian(&e), "doubled projections are not cartesian", &ce)?;
        let brute = hom_square_is_pullback(&d, &e, &cones[..1]);
        ensure(!brute, "brute force accepts a doubled apex", &ce)?;
        ensure(!one_pb(&d, &e).ctx(&ce)?, "a doubled 1-component passes as a pullback", &ce)?;
        bump(tally, "doubled squares");
    }

    // The image under evaluation is a pullback at every probe.
    let probes = [SliceObj::terminal(&x), SliceObj::new(r.p1.clone()), gen::slice(rng, &x, s.min(2))];
    for probe in &probes {
        let [ca, cb, cpa, cpb] = [&a, &b, &pa, &pb].map(|m| nat_component(m, probe).map(|c| c.0));
        let (ca, cb, cpa, cpb) = (ca.ctx(&ce)?, cb.ctx(&ce)?, cpa.ctx(&ce)?, cpb.ctx(&ce)?);
        let sq = square(cpa.src.carrier(), &cpa.mediating, &cpb.mediating, &ca.mediating, &cb.mediating);
        ensure(is_pb(&sq).ctx(&ce)?, "evaluation does not preserve the pullback", &ce)?;
    }
    Ok(())
}

// extension

fn law_functor_laws(rng: &mut Rng, s: usize, _tally: &mut Tally) -> Check {
    let x = gen::set_between(rng, "x", 1, s);
    let y = gen::set_between(rng, "y", 1, s);
    let p = gen::poly(rng, &x, &y, s);
    let x1 = gen::slice(rng, &x, s);
    let h1 = gen::slice_mor_from(rng, &x1, s.min(2));
    let h2 = gen::slice_mor_from(rng, &h1.tgt, s.min(2));
    let ce = json!({ "p": poly_to_json(&p), "x": slice_to_json(&x1) });
    let px1 = eval_obj(&p, &x1).ctx(&ce)?.0;
    ensure(eval_mor(&p, &SliceMor::identity(&x1)).ctx(&ce)? == SliceMor::identity(&px1), "p(1) is not 1", &ce)?;
    let ph1 = eval_mor(&p, &h1).ctx(&ce)?;
    let ph2 = eval_mor(&p, &h2).ctx(&ce)?;
    ensure(ph1.src == px1 && ph2.tgt == eval_obj(&p, &h2.tgt).ctx(&ce)?.0, "p(h) has the wrong boundary", &ce)?;
    let both = eval_mor(&p, &h1.then(&h2).ctx(&ce)?).ctx(&ce)?;
    ensure(both == ph1.then(&ph2).ctx(&ce)?, "p(h2 h1) differs from p(h2) p(h1)", &ce)?;

    // The stages of the evaluation are the expected pullbacks.
    let (_, t) = eval_obj(&p, &x1).ctx(&ce)?;
    ensure(is_pb(&t.corner).ctx(&ce)? && check_dpb_terminal(&t.dpb).ctx(&ce)?, "an evaluation stage is not universal", &ce)?;

    // Pullbacks of slices are preserved.
    let sq = slice_pullback(rng, &x1, s).ctx(&ce)?;
    let image = sq.each_ref().map(|h| eval_mor(&p, h));
    let [a, b, c, d] = image;
    ensure(image_is_pullback(&[a.ctx(&ce)?, b.ctx(&ce)?, c.ctx(&ce)?, d.ctx(&ce)?]).ctx(&ce)?, "p does not preserve a pullback of slices", &ce)?;

    // On a span, p(h) is the map induced between pullbacks.
    let sp = gen::span(rng, &x, &y, s);
    let induced = delta_mor(&sp.p1, &h1).ctx(&ce)?.mediating;
    ensure(eval_mor(&sp, &h1).ctx(&ce)?.mediating == induced, "a span acts on maps other than by pullback", &ce)
}

fn law_coherence(rng: &mut Rng, s: usize, _tally: &mut Tally) -> Check {
    let (x, seq) = gen::chain(rng, 3, s.min(2));
    let (p, q, r) = (&seq[0], &seq[1], &seq[2]);
    let sl = gen::slice(rng, &x, s.min(2));
    let ce = json!({ "polys": seq.iter().map(poly_to_json).collect::<Vec<_>>(), "x": slice_to_json(&sl) });
    let pi_qp = coherence_component(q, p, &sl).ctx(&ce)?;
    ensure(pi_qp.is_bijective(), "π is not a bijection", &ce)?;
    ensure(coherence_component_left_route(q, p, &sl).ctx(&ce)? == pi_qp, "π differs along the two constructions", &ce)?;

    // Naturality in the slice.
    let h = gen::slice_mor_from(rng, &sl, s.min(2));
    let pi_after = coherence_component(q, p, &h.tgt).ctx(&ce)?;
    let qp = compose2(q, p).ctx(&ce)?;
    let lhs = eval_mor(q, &eval_mor(p, &h).ctx(&ce)?).ctx(&ce)?.then(&pi_after).ctx(&ce)?;
    let rhs = pi_qp.then(&eval_mor(&qp, &h).ctx(&ce)?).ctx(&ce)?;
    ensure(lhs == rhs, "π is not natural", &ce)?;

    // Hexagon.
    let px = eval_obj(p, &sl).ctx(&ce)?.0;
    let rq = compose2(r, q).ctx(&ce)?;
    let one = eval_mor(r, &pi_qp)
        .ctx(&ce)?
        .then(&coherence_component(r, &qp, &sl).ctx(&ce)?)
        .ctx(&ce)?
        .then(&nat_component(&associator(r, q, p).ctx(&ce)?, &sl).ctx(&ce)?.0)
        .ctx(&ce)?;
    let two = coherence_component(r, q, &px)
        .ctx(&ce)?
        .then(&coherence_component(&rq, p, &sl).ctx(&ce)?)
        .ctx(&ce)?;
    ensure(one == two, "the hexagon does not commute", &ce)?;

    // p(x) seen through p ∘ lft x ∘ rgt g.
    let carrier = sl.carrier();
    ensure(eval_through_span(p, &sl, &FinFn::identity(carrier)).ctx(&ce)? == px, "p(x) differs through lft x", &ce)?;
    let z = gen::set_between(rng, "z", 1, s);
    let g = gen::func(rng, carrier, &z);
    let via = eval_through_span(p, &sl, &g).ctx(&ce)?;
    ensure(via.fiber_sizes() == px.fiber_sizes(), "p(x) differs through lft x ∘ rgt g", &ce)?;
    Ok(())
}

fn law_cartesian_image(rng: &mut Rng, s: usize, _tally: &mut Tally) -> Check {
    let x = gen::set_between(rng, "x", 1, s);
    let y = gen::set_between(rng, "y", 1, s);
    let q = gen::poly(rng, &x, &y, s);
    let m = gen::cartesian_into(rng, &q, s);
    let x1 = gen::slice(rng, &x, s);
    let h = gen::slice_mor_from(rng, &x1, s.min(2));
    let ce = json!({ "m": cartesian_to_json(&m), "x": slice_to_json(&x1) });
    let (c1, tr) = nat_component(&m, &x1).ctx(&ce)?;
    let (top, bot) = (&tr.top, &tr.bottom);
    let cross = [
        square(top.c2(), &top.to_a, &tr.f2, &m.f0, &bot.to_a),
        square(top.c3(), &top.p, &tr.f3, &tr.f2, &bot.p),
        square(top.c4(), &top.r, &tr.f4, &m.f1, &bot.r),
    ];
    for sq in &cross {
        ensure(is_pb(sq).ctx(&ce)?, "a cross square of the component is not a pullback", &ce)?;
    }
    let (c2, _) = nat_component(&m, &h.tgt).ctx(&ce)?;
    let ph = eval_mor(&m.src, &h).ctx(&ce)?;
    let qh = eval_mor(&m.tgt, &h).ctx(&ce)?;
    ensure(ph.then(&c2).ctx(&ce)? == c1.then(&qh).ctx(&ce)?, "components are not natural", &ce)?;
    let sq = square(c1.src.carrier(), &ph.mediating, &c1.mediating, &c2.mediating, &qh.mediating);
    ensure(is_pb(&sq).ctx(&ce)?, "a naturality square is not a pullback", &ce)?;
    let (at_one, _) = nat_component(&m, &SliceObj::terminal(&x)).ctx(&ce)?;
    ensure(at_one.mediating == m.f1, "the component at 1 is not f1", &ce)?;
    let (id, _) = nat_component(&CartesianMorphism::identity(&q), &x1).ctx(&ce)?;
    ensure(id == SliceMor::identity(&id.src), "the identity has a non-identity component", &ce)?;
    Ok(())
}

fn probes(q: &Polynomial) -> [SliceObj; 2] {
    [SliceObj::terminal(q.src()), SliceObj::new(q.p1.clone())]
}

fn law_faithful(rng: &mut Rng, s: usize, tally: &mut Tally) -> Check {
    let mut pair = None;
    for _ in 0..40 {
        let x = gen::set_between(rng, "x", 1, s);
        let y = gen::set_between(rng, "y", 1, s);
        let q = gen::poly(rng, &x, &y, s);
        let m = gen::cartesian_into(rng, &q, s);
        let all = enumerate_cartesian(&m.src, &q)?;
        if all.len() >= 2 {
            let i = rng.gen_range(0..all.len());
            let j = (i + rng.gen_range(1..all.len())) % all.len();
            pair = Some((all[i].clone(), all[j].clone()));
            break;
        }
    }
    let (m, n) = match pair {
        Some(p) => p,
        None => {
            // Two summands with no usages, swapped.
            let one = FinSet::numbered("x", 1);
            let b = FinSet::numbered("b", 2);
            let q = Polynomial { p1: FinFn::from_empty(&one), p2: FinFn::from_empty(&b), p3: FinFn::from_indices(b.clone(), one.clone(), vec![0, 0])? };
            let e = FinSet::numbered("e", 1);
            let p = Polynomial { p1: FinFn::from_empty(&one), p2: FinFn::from_empty(&e), p3: FinFn::from_indices(e.clone(), one.clone(), vec![0])? };
            bump(tally, "fallback pairs");
            (
                CartesianMorphism::new(p.clone(), q.clone(), FinFn::from_empty(&FinSet::empty()), FinFn::from_indices(e.clone(), b.clone(), vec![0])?)?,
                CartesianMorphism::new(p, q, FinFn::from_empty(&FinSet::empty()), FinFn::from_indices(e, b, vec![1])?)?,
            )
        }
    };
    let ce = json!({ "m": cartesian_to_json(&m), "n": cartesian_to_json(&n) });
    ensure(m != n, "generated morphisms are equal", &ce)?;
    let mut differ = false;
    for probe in probes(&m.tgt) {
        differ |= nat_component(&m, &probe).ctx(&ce)?.0 != nat_component(&n, &probe).ctx(&ce)?.0;
    }
    ensure(differ, "distinct morphisms agree at both probes", &ce)
}

fn law_conservative(rng: &mut Rng, s: usize, tally: &mut Tally) -> Check {
    let x = gen::set_between(rng, "x", 1, s);
    let y = gen::set_between(rng, "y", 1, s);
    let q = gen::poly(rng, &x, &y, s);
    let m = if rng.gen_bool(0.5) { gen::iso_into(rng, &q) } else { gen::cartesian_into(rng, &q, s) };
    let ce = json!({ "m": cartesian_to_json(&m) });
    let mut bijective = true;
    for probe in probes(&q) {
        bijective &= nat_component(&m, &probe).ctx(&ce)?.0.is_bijective();
    }
    ensure(bijective == m.is_invertible(), "bijective components at the probes do not match invertibility", &ce)?;
    if bijective {
        bump(tally, "invertible instances");
    }
    Ok(())
}

// symbolic

fn sym_json(s: &crate::symbolic::SymPoly) -> Value {
    json!({ "text": s.to_string(), "in": s.in_vars, "out": s.out_vars })
}

fn law_oracle_agreement(rng: &mut Rng, _s: usize, _tally: &mut Tally) -> Check {
    let sp = gen::sympoly(rng);
    let a = gen::assignment(rng, &sp, 4);
    let ce = json!({ "poly": sym_json(&sp), "assignment": a });
    let p = encode(&sp).ctx(&ce)?;
    let via = eval_via_extension(&p, &a).ctx(&ce)?;
    let direct = eval_sym(&sp, &a).ctx(&ce)?;
    ensure(via == direct, format!("extension gives {via:?}, arithmetic gives {direct:?}"), &ce)
}

fn law_roundtrip(rng: &mut Rng, _s: usize, _tally: &mut Tally) -> Check {
    let sp = gen::sympoly(rng);
    let ce = json!({ "poly": sym_json(&sp) });
    let p = encode(&sp).ctx(&ce)?;
    ensure(decode(&p).ctx(&ce)?.equivalent(&sp), "decode∘encode is not the identity", &ce)?;
    ensure(poly_from_json(&poly_to_json(&p)).ctx(&ce)? == p, "JSON does not round-trip", &ce)?;
    let reparsed = parse_poly(&sp.to_string()).ctx(&ce)?;
    ensure(reparsed.normalized().outputs == sp.normalized().outputs, "text form does not round-trip", &ce)?;
    for e in p.mid_src().iter().chain(p.mid_tgt().iter()) {
        ensure(crate::json::element_from_json(&element_to_json(e)).ctx(&ce)? == *e, "element JSON does not round-trip", &ce)?;
    }
    Ok(())
}

fn law_substitution(rng: &mut Rng, _s: usize, _tally: &mut Tally) -> Check {
    let inner = gen::single_var(rng, "x", "y");
    let outer = gen::single_var(rng, "y", "out1");
    let ce = json!({ "p": sym_json(&inner), "q": sym_json(&outer) });
    let composed = compose2(&encode(&outer).ctx(&ce)?, &encode(&inner).ctx(&ce)?).ctx(&ce)?;
    let decoded = decode(&composed).ctx(&ce)?;
    let expected = substitute(&outer, &inner).ctx(&ce)?;
    ensure(decoded.equivalent(&expected), format!("composite decodes to {decoded}, substitution gives {expected}"), &ce)?;
    for v in 0..=u64::from(expected.degree()) {
        let a: Assignment = [("x".to_string(), v)].into();
        ensure(eval_sym(&decoded, &a).ctx(&ce)? == eval_sym(&expected, &a).ctx(&ce)?, format!("values differ at x = {v}"), &ce)?;
    }
    Ok(())
}
