//! The base category: finite sets of structured elements, total functions
//! between them, and canonically chosen pullbacks.
//!
//! Every set is a sorted array of [`Element`]s and sets are compared by
//! contents only. Pullbacks are the pair sets `{(a, b) | f(a) = g(b)}`,
//! except that a pullback along an identity reuses the other leg's domain so
//! that pulling back identities gives identities on the nose.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mutation::{self, Mutant};

/// A structured label. All sets built by the library draw from this universe.
///
/// The derived order is the global total order: atoms before pairs before
/// section tables, lexicographic within each kind.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Atom(Arc<str>),
    Pair(Arc<(Element, Element)>),
    /// A finite table `key -> value`, sorted by key with distinct keys.
    Sect(Arc<[(Element, Element)]>),
}

impl Element {
    pub fn atom(token: impl AsRef<str>) -> Self {
        Element::Atom(Arc::from(token.as_ref()))
    }

    pub fn pair(left: Element, right: Element) -> Self {
        Element::Pair(Arc::new((left, right)))
    }

    /// Builds a section table, sorting the entries into canonical form.
    pub fn sect(mut entries: Vec<(Element, Element)>) -> Result<Self> {
        entries.sort();
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateElement(format!("section key {}", w[0].0)));
        }
        Ok(Element::Sect(entries.into()))
    }

    /// Section table from entries already sorted by distinct keys.
    pub(crate) fn sect_sorted(entries: Vec<(Element, Element)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Element::Sect(entries.into())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Element::Atom(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&Element, &Element)> {
        match self {
            Element::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn as_sect(&self) -> Option<&[(Element, Element)]> {
        match self {
            Element::Sect(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Atom(s) => write!(f, "{s}"),
            Element::Pair(p) => write!(f, "({}, {})", p.0, p.1),
            Element::Sect(entries) => {
                write!(f, "{{")?;
                for (i, (k, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k} -> {v}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite set of elements, stored sorted and without duplicates.
// Equality is content equality with a pointer shortcut, so the derived hash
// agrees with it.
#[allow(clippy::derived_hash_with_manual_eq)]
#[derive(Clone, Hash, PartialOrd, Ord)]
pub struct FinSet {
    elems: Arc<[Element]>,
}

impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.elems, &other.elems) || self.elems == other.elems
    }
}

impl Eq for FinSet {}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl FinSet {
    pub fn new(elements: impl IntoIterator<Item = Element>) -> Result<Self> {
        let mut v: Vec<Element> = elements.into_iter().collect();
        v.sort();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0].to_string()));
        }
        Ok(FinSet { elems: v.into() })
    }

    pub fn empty() -> Self {
        FinSet { elems: Arc::from(Vec::new()) }
    }

    /// A set of `n` atoms named `{prefix}{i}`; handy for generated instances.
    pub fn numbered(prefix: &str, n: usize) -> Self {
        let v: Vec<Element> = (0..n).map(|i| Element::atom(format!("{prefix}{i}"))).collect();
        FinSet::new(v).expect("numbered atoms are distinct")
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elems
    }

    pub fn get(&self, i: usize) -> &Element {
        &self.elems[i]
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.elems.binary_search(e).ok()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.index_of(e).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Element> {
        self.elems.iter()
    }
}

/// Builds the set `{Atom(t) | t in tokens}`.
pub fn mk_finset<S: AsRef<str>>(tokens: &[S]) -> Result<FinSet> {
    FinSet::new(tokens.iter().map(Element::atom))
}

/// A total function between finite sets. The graph is stored as the index of
/// each image in `cod`, aligned with the sorted elements of `dom`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinFn {
    dom: FinSet,
    cod: FinSet,
    images: Arc<[usize]>,
}

impl fmt::Debug for FinFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.graph()).finish()
    }
}

impl FinFn {
    /// Builds a function from its graph. Every element of `dom` must be
    /// assigned exactly once, and every image must lie in `cod`.
    pub fn new(dom: FinSet, cod: FinSet, pairs: impl IntoIterator<Item = (Element, Element)>) -> Result<Self> {
        let mut images: Vec<Option<usize>> = vec![None; dom.len()];
        for (arg, val) in pairs {
            let i = dom
                .index_of(&arg)
                .ok_or_else(|| Error::IllFormedFunction(format!("{arg} is not in the domain")))?;
            let j = cod
                .index_of(&val)
                .ok_or_else(|| Error::IllFormedFunction(format!("{val} is not in the codomain")))?;
            if images[i].replace(j).is_some() {
                return Err(Error::IllFormedFunction(format!("{arg} is assigned twice")));
            }
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, j)| j.ok_or_else(|| Error::IllFormedFunction(format!("{} is unassigned", dom.get(i)))))
            .collect::<Result<Vec<_>>>()?;
        Ok(FinFn { dom, cod, images: images.into() })
    }

    /// Builds a function from image indices aligned with `dom`.
    pub fn from_indices(dom: FinSet, cod: FinSet, images: Vec<usize>) -> Result<Self> {
        if images.len() != dom.len() {
            return Err(Error::IllFormedFunction(format!(
                "{} images for a domain of size {}",
                images.len(),
                dom.len()
            )));
        }
        if let Some(&j) = images.iter().find(|&&j| j >= cod.len()) {
            return Err(Error::IllFormedFunction(format!("image index {j} out of range")));
        }
        Ok(FinFn { dom, cod, images: images.into() })
    }

    pub(crate) fn from_indices_unchecked(dom: FinSet, cod: FinSet, images: Vec<usize>) -> Self {
        debug_assert_eq!(images.len(), dom.len());
        debug_assert!(images.iter().all(|&j| j < cod.len()));
        FinFn { dom, cod, images: images.into() }
    }

    /// Builds a function by evaluating `f` on each domain element.
    pub fn from_map(dom: FinSet, cod: FinSet, mut f: impl FnMut(&Element) -> Element) -> Result<Self> {
        let images = dom
            .iter()
            .map(|e| {
                let v = f(e);
                cod.index_of(&v)
                    .ok_or_else(|| Error::IllFormedFunction(format!("{e} maps to {v}, outside the codomain")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FinFn { dom, cod, images: images.into() })
    }

    pub fn identity(set: &FinSet) -> Self {
        FinFn { dom: set.clone(), cod: set.clone(), images: (0..set.len()).collect::<Vec<_>>().into() }
    }

    /// The unique map out of the empty set.
    pub fn from_empty(cod: &FinSet) -> Self {
        FinFn { dom: FinSet::empty(), cod: cod.clone(), images: Arc::from(Vec::new()) }
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image index of the domain element with index `i`.
    pub fn at(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn apply(&self, e: &Element) -> Option<&Element> {
        self.dom.index_of(e).map(|i| self.cod.get(self.images[i]))
    }

    pub fn graph(&self) -> impl Iterator<Item = (&Element, &Element)> {
        self.dom.iter().zip(self.images.iter().map(|&j| self.cod.get(j)))
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        self.images.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.cod.len()];
        for &j in self.images.iter() {
            seen[j] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.len() == self.cod.len() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<FinFn> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.cod.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Some(FinFn::from_indices_unchecked(self.cod.clone(), self.dom.clone(), inv))
    }

    /// Domain indices mapping to the codomain index `j`, in increasing order.
    pub fn fiber(&self, j: usize) -> Vec<usize> {
        self.images.iter().enumerate().filter(|(_, &k)| k == j).map(|(i, _)| i).collect()
    }

    /// All fibers, indexed by codomain index.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cod.len()];
        for (i, &j) in self.images.iter().enumerate() {
            out[j].push(i);
        }
        out
    }

    /// `self` followed by `next`, i.e. `next ∘ self`.
    pub fn then(&self, next: &FinFn) -> Result<FinFn> {
        compose_fn(next, self)
    }
}

/// The pointwise composite `g ∘ f`.
pub fn compose_fn(g: &FinFn, f: &FinFn) -> Result<FinFn> {
    if f.cod != g.dom {
        return Err(Error::NotComposable(format!(
            "codomain of size {} does not match domain of size {}",
            f.cod.len(),
            g.dom.len()
        )));
    }
    let images = f.images.iter().map(|&j| g.images[j]).collect();
    Ok(FinFn::from_indices_unchecked(f.dom.clone(), g.cod.clone(), images))
}

/// A commuting square `leg1 ∘ proj1 = leg2 ∘ proj2` with `proj1: apex -> A`,
/// `proj2: apex -> B`, `leg1: A -> C`, `leg2: B -> C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackSquare {
    pub apex: FinSet,
    pub proj1: FinFn,
    pub proj2: FinFn,
    pub leg1: FinFn,
    pub leg2: FinFn,
}

/// The chosen pullback of `f: A -> C` and `g: B -> C`.
///
/// The apex is `{Pair(a, b) | f(a) = g(b)}` unless one of the legs is an
/// identity: then the other leg's domain is the apex and the projection
/// opposite the identity is itself an identity.
pub fn pullback(f: &FinFn, g: &FinFn) -> Result<PullbackSquare> {
    if f.cod != g.cod {
        return Err(Error::NotComposable("pullback legs have different codomains".into()));
    }
    if !mutation::is_active(Mutant::UnnormalizedIdentityPullback) {
        if g.is_identity() {
            return Ok(PullbackSquare {
                apex: f.dom.clone(),
                proj1: FinFn::identity(&f.dom),
                proj2: f.clone(),
                leg1: f.clone(),
                leg2: g.clone(),
            });
        }
        if f.is_identity() {
            return Ok(PullbackSquare {
                apex: g.dom.clone(),
                proj1: g.clone(),
                proj2: FinFn::identity(&g.dom),
                leg1: f.clone(),
                leg2: g.clone(),
            });
        }
    }
    pair_pullback(f, g)
}

/// The pair-set pullback, with no identity normalization.
pub fn pair_pullback(f: &FinFn, g: &FinFn) -> Result<PullbackSquare> {
    if f.cod != g.cod {
        return Err(Error::NotComposable("pullback legs have different codomains".into()));
    }
    let g_fibers = g.fibers();
    let mut pairs = Vec::new();
    for (i, &c) in f.images.iter().enumerate() {
        for &j in &g_fibers[c] {
            pairs.push((i, j));
        }
    }
    let mut elems: Vec<(Element, usize, usize)> = pairs
        .into_iter()
        .map(|(i, j)| (Element::pair(f.dom.get(i).clone(), g.dom.get(j).clone()), i, j))
        .collect();
    elems.sort_by(|a, b| a.0.cmp(&b.0));
    let p1: Vec<usize> = elems.iter().map(|e| e.1).collect();
    let p2: Vec<usize> = elems.iter().map(|e| e.2).collect();
    let apex = FinSet { elems: elems.into_iter().map(|e| e.0).collect::<Vec<_>>().into() };
    Ok(PullbackSquare {
        proj1: FinFn::from_indices_unchecked(apex.clone(), f.dom.clone(), p1),
        proj2: FinFn::from_indices_unchecked(apex.clone(), g.dom.clone(), p2),
        apex,
        leg1: f.clone(),
        leg2: g.clone(),
    })
}

impl PullbackSquare {
    /// Checks that the four maps fit together and that the square commutes.
    pub fn check_commutes(&self) -> Result<()> {
        let fits = self.proj1.dom == self.apex
            && self.proj2.dom == self.apex
            && self.proj1.cod == self.leg1.dom
            && self.proj2.cod == self.leg2.dom
            && self.leg1.cod == self.leg2.cod;
        if !fits {
            return Err(Error::NotASquare("boundaries do not match".into()));
        }
        let commutes = (0..self.apex.len())
            .all(|x| self.leg1.at(self.proj1.at(x)) == self.leg2.at(self.proj2.at(x)));
        if !commutes {
            return Err(Error::NotASquare("square does not commute".into()));
        }
        Ok(())
    }

    /// The unique map `T -> apex` whose composites with the projections are
    /// `u: T -> A` and `v: T -> B`.
    pub fn mediate(&self, u: &FinFn, v: &FinFn) -> Result<FinFn> {
        if u.dom != v.dom || u.cod != self.leg1.dom || v.cod != self.leg2.dom {
            return Err(Error::NotComposable("cone does not fit the pullback".into()));
        }
        let table: HashMap<(usize, usize), usize> =
            (0..self.apex.len()).map(|x| ((self.proj1.at(x), self.proj2.at(x)), x)).collect();
        let paranoid = mutation::paranoid();
        let images = (0..u.dom.len())
            .map(|t| {
                let key = (u.at(t), v.at(t));
                let found = table.get(&key).copied();
                if paranoid {
                    let hits = (0..self.apex.len())
                        .filter(|&x| (self.proj1.at(x), self.proj2.at(x)) == key)
                        .count();
                    if hits > 1 {
                        return Err(Error::NoMediator(format!("mediator at {} is not unique", u.dom.get(t))));
                    }
                }
                found.ok_or_else(|| {
                    Error::NoMediator(format!(
                        "no apex element over ({}, {})",
                        self.leg1.dom.get(key.0),
                        self.leg2.dom.get(key.1)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FinFn::from_indices_unchecked(u.dom.clone(), self.apex.clone(), images))
    }
}

/// Decides whether a commuting square is a pullback, by checking that the
/// pairing `apex -> {(a, b) | leg1(a) = leg2(b)}` is a bijection.
///
/// In finite sets this is equivalent to the universal property quantified
/// over all test objects.
pub fn check_pullback(sq: &PullbackSquare) -> Result<bool> {
    sq.check_commutes()?;
    let mut seen = std::collections::HashSet::with_capacity(sq.apex.len());
    for x in 0..sq.apex.len() {
        if !seen.insert((sq.proj1.at(x), sq.proj2.at(x))) {
            return Ok(false);
        }
    }
    let leg2_fibers = sq.leg2.fibers();
    let matching: usize = sq.leg1.images.iter().map(|&c| leg2_fibers[c].len()).sum();
    Ok(matching == sq.apex.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(tokens: &[&str]) -> FinSet {
        mk_finset(tokens).unwrap()
    }

    fn func(dom: &FinSet, cod: &FinSet, pairs: &[(&str, &str)]) -> FinFn {
        FinFn::new(dom.clone(), cod.clone(), pairs.iter().map(|(a, b)| (Element::atom(a), Element::atom(b)))).unwrap()
    }

    #[test]
    fn finset_construction() {
        assert_eq!(set(&["w", "x", "y", "z"]).len(), 4);
        assert!(set(&[]).is_empty());
        assert!(matches!(mk_finset(&["a", "a"]), Err(Error::DuplicateElement(_))));
    }

    #[test]
    fn element_order_kinds() {
        let a = Element::atom("z");
        let p = Element::pair(Element::atom("a"), Element::atom("a"));
        let s = Element::sect(vec![]).unwrap();
        assert!(a < p && p < s);
        let s2 = Element::sect(vec![(Element::atom("b"), a.clone()), (Element::atom("a"), a.clone())]).unwrap();
        assert_eq!(s2.as_sect().unwrap()[0].0, Element::atom("a"));
        assert!(Element::sect(vec![(a.clone(), a.clone()), (a.clone(), p)]).is_err());
    }

    #[test]
    fn function_validation() {
        let x = set(&["a", "b"]);
        let id = func(&x, &x, &[("a", "a"), ("b", "b")]);
        assert!(id.is_identity());
        assert_eq!(id, FinFn::identity(&x));
        let missing = FinFn::new(x.clone(), x.clone(), [(Element::atom("a"), Element::atom("a"))]);
        assert!(matches!(missing, Err(Error::IllFormedFunction(_))));
        let outside = FinFn::new(x.clone(), x.clone(), [(Element::atom("a"), Element::atom("q"))]);
        assert!(matches!(outside, Err(Error::IllFormedFunction(_))));
    }

    #[test]
    fn composition() {
        let a = set(&["a"]);
        let b = set(&["b"]);
        let c = set(&["c"]);
        let f = func(&a, &b, &[("a", "b")]);
        let g = func(&b, &c, &[("b", "c")]);
        let gf = compose_fn(&g, &f).unwrap();
        assert_eq!(gf.apply(&Element::atom("a")), Some(&Element::atom("c")));
        assert_eq!(compose_fn(&g, &FinFn::identity(&b)).unwrap(), g);
        assert!(matches!(compose_fn(&f, &g), Err(Error::NotComposable(_))));
    }

    #[test]
    fn pullback_of_constants_is_product() {
        let two = set(&["a1", "a2"]);
        let three = set(&["b1", "b2", "b3"]);
        let one = set(&["c"]);
        let f = func(&two, &one, &[("a1", "c"), ("a2", "c")]);
        let g = func(&three, &one, &[("b1", "c"), ("b2", "c"), ("b3", "c")]);
        let sq = pullback(&f, &g).unwrap();
        assert_eq!(sq.apex.len(), 6);
        assert!(sq.apex.iter().all(|e| e.as_pair().is_some()));
        assert!(check_pullback(&sq).unwrap());
    }

    #[test]
    fn pullback_matching_pairs() {
        let a = set(&["a1", "a2"]);
        let b = set(&["b1"]);
        let c = set(&["c1", "c2"]);
        let f = func(&a, &c, &[("a1", "c1"), ("a2", "c2")]);
        let g = func(&b, &c, &[("b1", "c1")]);
        let sq = pullback(&f, &g).unwrap();
        assert_eq!(sq.apex, FinSet::new([Element::pair(Element::atom("a1"), Element::atom("b1"))]).unwrap());
    }

    #[test]
    fn pullback_along_identity_is_normalized() {
        let a = set(&["a1", "a2", "a3"]);
        let b = set(&["b1", "b2"]);
        let f = func(&a, &b, &[("a1", "b1"), ("a2", "b1"), ("a3", "b2")]);
        let id = FinFn::identity(&b);
        let sq = pullback(&f, &id).unwrap();
        assert_eq!(sq.apex, a);
        assert_eq!(sq.proj1, FinFn::identity(&a));
        assert_eq!(sq.proj2, f);
        let sq = pullback(&id, &f).unwrap();
        assert_eq!(sq.apex, a);
        assert_eq!(sq.proj1, f);
        assert_eq!(sq.proj2, FinFn::identity(&a));
        assert!(check_pullback(&sq).unwrap());
    }

    #[test]
    fn doubled_apex_is_not_a_pullback() {
        let a = set(&["a"]);
        let one = set(&["c"]);
        let f = func(&a, &one, &[("a", "c")]);
        let apex = set(&["x1", "x2"]);
        let to_a = func(&apex, &a, &[("x1", "a"), ("x2", "a")]);
        let sq = PullbackSquare { apex, proj1: to_a.clone(), proj2: to_a, leg1: f.clone(), leg2: f };
        assert!(!check_pullback(&sq).unwrap());
    }

    #[test]
    fn empty_square_is_a_pullback() {
        let e = FinSet::empty();
        let id = FinFn::identity(&e);
        let sq = PullbackSquare { apex: e, proj1: id.clone(), proj2: id.clone(), leg1: id.clone(), leg2: id };
        assert!(check_pullback(&sq).unwrap());
    }

    #[test]
    fn non_commuting_square_is_rejected() {
        let a = set(&["a1", "a2"]);
        let apex = set(&["x"]);
        let u = func(&apex, &a, &[("x", "a1")]);
        let v = func(&apex, &a, &[("x", "a2")]);
        let id = FinFn::identity(&a);
        let sq = PullbackSquare { apex, proj1: u, proj2: v, leg1: id.clone(), leg2: id };
        assert!(matches!(check_pullback(&sq), Err(Error::NotASquare(_))));
    }

    #[test]
    fn mediation_through_pair_pullback() {
        let a = set(&["a1", "a2"]);
        let one = set(&["c"]);
        let f = func(&a, &one, &[("a1", "c"), ("a2", "c")]);
        let sq = pullback(&f, &f).unwrap();
        let t = set(&["t"]);
        let u = func(&t, &a, &[("t", "a1")]);
        let v = func(&t, &a, &[("t", "a2")]);
        let m = sq.mediate(&u, &v).unwrap();
        assert_eq!(compose_fn(&sq.proj1, &m).unwrap(), u);
        assert_eq!(compose_fn(&sq.proj2, &m).unwrap(), v);
    }
}
