//! Multivariate polynomials with natural coefficients, their diagrams
//! `In <- UVar -> MSum -> Out`, and arithmetic evaluation as an oracle.
//!
//! Grammar: outputs separated by `;`, monomials by `+`, factors are natural
//! numbers or `var` / `var^k`, with `*` optional between factors. A variable
//! is one letter followed by any digits, so `x^3y` reads as `x^3 * y`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::extension::eval_obj;
use crate::finset::{Element, FinFn, FinSet};
use crate::poly::Polynomial;
use crate::slices::SliceObj;

/// Exponents by variable name; the empty map is the constant 1.
pub type Monomial = BTreeMap<String, u32>;

/// Values for the input variables.
pub type Assignment = BTreeMap<String, u64>;

/// Output values by output name.
pub type Counts = BTreeMap<String, u128>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymPoly {
    pub in_vars: Vec<String>,
    pub out_vars: Vec<String>,
    /// `outputs[j]` is the multiset of monomials summed into output `j`.
    pub outputs: Vec<Vec<Monomial>>,
}

impl SymPoly {
    /// Sorts every output's monomials so that equality is multiset equality.
    pub fn normalized(&self) -> SymPoly {
        let mut out = self.clone();
        for ms in &mut out.outputs {
            ms.sort();
        }
        out
    }

    /// Equality up to the order of monomials within each output.
    pub fn equivalent(&self, other: &SymPoly) -> bool {
        self.normalized() == other.normalized()
    }

    /// Highest total degree of any monomial.
    pub fn degree(&self) -> u32 {
        self.outputs.iter().flatten().map(|m| m.values().sum()).max().unwrap_or(0)
    }

    /// Renames the outputs.
    pub fn with_outputs(mut self, names: &[String]) -> Result<SymPoly> {
        if names.len() != self.outputs.len() {
            return Err(Error::ParseError {
                pos: 0,
                msg: format!("{} output names for {} outputs", names.len(), self.outputs.len()),
            });
        }
        self.out_vars = names.to_vec();
        Ok(self)
    }
}

impl std::fmt::Display for SymPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (j, ms) in self.normalized().outputs.iter().enumerate() {
            if j > 0 {
                f.write_str(" ; ")?;
            }
            // Collapse repeated monomials into coefficients.
            let mut grouped: Vec<(&Monomial, usize)> = Vec::new();
            for m in ms {
                match grouped.last_mut() {
                    Some((last, k)) if *last == m => *k += 1,
                    _ => grouped.push((m, 1)),
                }
            }
            if grouped.is_empty() {
                f.write_str("0")?;
            }
            for (i, (m, k)) in grouped.iter().enumerate() {
                if i > 0 {
                    f.write_str(" + ")?;
                }
                let mut factors: Vec<String> = Vec::new();
                if *k > 1 || m.is_empty() {
                    factors.push(k.to_string());
                }
                for (v, e) in m.iter() {
                    factors.push(if *e == 1 { v.clone() } else { format!("{v}^{e}") });
                }
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::ParseError { pos: self.pos, msg: msg.into() })
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        digits.parse().map_err(|_| Error::ParseError { pos: start, msg: "number out of range".into() })
    }

    fn var(&mut self) -> String {
        let start = self.pos;
        self.pos += 1;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8(self.src[start..self.pos].to_vec()).unwrap()
    }

    /// One summand: a coefficient and a monomial.
    fn term(&mut self) -> Result<(u64, Monomial)> {
        let mut coeff: u64 = 1;
        let mut mono = Monomial::new();
        let mut factors = 0;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let n = self.number()?;
                    coeff = coeff.checked_mul(n).ok_or(Error::Overflow)?;
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let v = self.var();
                    let mut e = 1u32;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        match self.peek() {
                            Some(c) if c.is_ascii_digit() => {
                                e = u32::try_from(self.number()?).map_err(|_| Error::Overflow)?;
                            }
                            _ => return self.fail("expected an exponent after '^'"),
                        }
                    }
                    *mono.entry(v).or_insert(0) += e;
                }
                _ => {
                    return if factors == 0 { self.fail("expected a number or a variable") } else { Ok((coeff, mono)) };
                }
            }
            factors += 1;
            if self.peek() == Some(b'*') {
                self.pos += 1;
                match self.peek() {
                    Some(c) if c.is_ascii_alphanumeric() => {}
                    _ => return self.fail("expected a factor after '*'"),
                }
            }
        }
    }

    fn output(&mut self) -> Result<Vec<Monomial>> {
        let mut ms = Vec::new();
        loop {
            let (coeff, mono) = self.term()?;
            let mono: Monomial = mono.into_iter().filter(|(_, e)| *e > 0).collect();
            for _ in 0..coeff {
                ms.push(mono.clone());
            }
            if self.peek() == Some(b'+') {
                self.pos += 1;
            } else {
                return Ok(ms);
            }
        }
    }
}

/// Parses `text`, taking the occurring variables sorted by name as inputs
/// and naming outputs `out1, out2, ...`.
pub fn parse_poly(text: &str) -> Result<SymPoly> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let mut outputs = vec![p.output()?];
    while p.peek() == Some(b';') {
        p.pos += 1;
        outputs.push(p.output()?);
    }
    if p.peek().is_some() {
        return p.fail("unexpected character");
    }
    let mut in_vars: Vec<String> = outputs.iter().flatten().flat_map(|m| m.keys().cloned()).collect();
    in_vars.sort();
    in_vars.dedup();
    let out_vars = (1..=outputs.len()).map(|i| format!("out{i}")).collect();
    Ok(SymPoly { in_vars, out_vars, outputs })
}

/// Parses against a declared list of input variables, which may include
/// variables that do not occur.
pub fn parse_poly_with_inputs(text: &str, in_vars: &[String]) -> Result<SymPoly> {
    let mut s = parse_poly(text)?;
    if let Some(v) = s.in_vars.iter().find(|v| !in_vars.contains(v)) {
        let pos = text.find(v.as_str()).unwrap_or(0);
        return Err(Error::ParseError { pos, msg: format!("variable {v} is not among the declared inputs") });
    }
    s.in_vars = in_vars.to_vec();
    Ok(s)
}

fn atoms(names: &[String]) -> Result<FinSet> {
    FinSet::new(names.iter().map(Element::atom))
}

/// The diagram `In <- UVar -> MSum -> Out`, one summand element per monomial
/// occurrence and one usage element per variable occurrence.
pub fn encode(s: &SymPoly) -> Result<Polynomial> {
    let ins = atoms(&s.in_vars)?;
    let outs = atoms(&s.out_vars)?;
    let mut sums = Vec::new();
    let mut usages = Vec::new();
    for (j, ms) in s.outputs.iter().enumerate() {
        for m in ms {
            let b = Element::atom(format!("m{}", sums.len()));
            let mut u = 0;
            for (v, e) in m {
                let x = Element::atom(v);
                if !ins.contains(&x) {
                    return Err(Error::NotNameable(v.clone()));
                }
                for _ in 0..*e {
                    usages.push((Element::atom(format!("{b}.u{u}")), x.clone(), b.clone()));
                    u += 1;
                }
            }
            sums.push((b, Element::atom(&s.out_vars[j])));
        }
    }
    let msum = FinSet::new(sums.iter().map(|(b, _)| b.clone()))?;
    let uvar = FinSet::new(usages.iter().map(|(a, _, _)| a.clone()))?;
    let p1 = FinFn::new(uvar.clone(), ins, usages.iter().map(|(a, x, _)| (a.clone(), x.clone())))?;
    let p2 = FinFn::new(uvar, msum.clone(), usages.iter().map(|(a, _, b)| (a.clone(), b.clone())))?;
    let p3 = FinFn::new(msum, outs, sums)?;
    Ok(Polynomial { p1, p2, p3 })
}

fn names(set: &FinSet) -> Result<Vec<String>> {
    set.iter().map(|e| e.as_atom().map(str::to_string).ok_or_else(|| Error::NotNameable(e.to_string()))).collect()
}

/// Reads monomials back off the fibers of `p2`.
pub fn decode(p: &Polynomial) -> Result<SymPoly> {
    let in_vars = names(p.src())?;
    let out_vars = names(p.tgt())?;
    let mut outputs = vec![Vec::new(); out_vars.len()];
    let fibers = p.p2.fibers();
    for (b, fiber) in fibers.iter().enumerate() {
        let mut m = Monomial::new();
        for &a in fiber {
            *m.entry(in_vars[p.p1.at(a)].clone()).or_insert(0) += 1;
        }
        outputs[p.p3.at(b)].push(m);
    }
    Ok(SymPoly { in_vars, out_vars, outputs }.normalized())
}

fn lookup(a: &Assignment, v: &str) -> Result<u128> {
    a.get(v).map(|&n| n as u128).ok_or_else(|| Error::IncompleteAssignment(v.to_string()))
}

/// Ordinary arithmetic evaluation.
pub fn eval_sym(s: &SymPoly, a: &Assignment) -> Result<Counts> {
    for v in &s.in_vars {
        lookup(a, v)?;
    }
    let mut out = Counts::new();
    for (name, ms) in s.out_vars.iter().zip(&s.outputs) {
        let mut total: u128 = 0;
        for m in ms {
            let mut prod: u128 = 1;
            for (v, e) in m {
                let base = lookup(a, v)?;
                prod = prod.checked_mul(base.checked_pow(*e).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?;
            }
            total = total.checked_add(prod).ok_or(Error::Overflow)?;
        }
        out.insert(name.clone(), total);
    }
    Ok(out)
}

/// The slice over `base` whose fiber over each named element has the
/// assigned size.
pub fn slice_of_assignment(base: &FinSet, a: &Assignment) -> Result<SliceObj> {
    let vars = names(base)?;
    let mut carrier = Vec::new();
    let mut images = Vec::new();
    for (i, v) in vars.iter().enumerate() {
        for k in 0..lookup(a, v)? {
            carrier.push(Element::pair(Element::atom(v), Element::atom(k.to_string())));
            images.push(i);
        }
    }
    // Carrier order is sorted; recover images through the pairs.
    let set = FinSet::new(carrier.iter().cloned())?;
    let f = FinFn::new(set, base.clone(), carrier.into_iter().zip(images).map(|(e, i)| (e, base.get(i).clone())))?;
    Ok(SliceObj::new(f))
}

/// Output fiber sizes of `p(x)` where `x` has fiber sizes given by `a`.
pub fn eval_via_extension(p: &Polynomial, a: &Assignment) -> Result<Counts> {
    let x = slice_of_assignment(p.src(), a)?;
    let (out, _) = eval_obj(p, &x)?;
    let outs = names(p.tgt())?;
    Ok(outs.into_iter().zip(out.fiber_sizes()).map(|(n, k)| (n, k as u128)).collect())
}

fn multiply(a: &Monomial, b: &Monomial) -> Monomial {
    let mut m = a.clone();
    for (v, e) in b {
        *m.entry(v.clone()).or_insert(0) += e;
    }
    m
}

/// `q ∘ p`: substitutes the outputs of `p` for the inputs of `q`, matched by
/// name, and expands.
pub fn substitute(q: &SymPoly, p: &SymPoly) -> Result<SymPoly> {
    let by_name: BTreeMap<&str, &Vec<Monomial>> = p.out_vars.iter().map(String::as_str).zip(&p.outputs).collect();
    let mut outputs = Vec::with_capacity(q.outputs.len());
    for ms in &q.outputs {
        let mut expanded = Vec::new();
        for m in ms {
            let mut acc = vec![Monomial::new()];
            for (v, e) in m {
                let sum = by_name.get(v.as_str()).ok_or_else(|| Error::NotNameable(v.clone()))?;
                for _ in 0..*e {
                    acc = acc.iter().flat_map(|x| sum.iter().map(move |y| multiply(x, y))).collect();
                }
            }
            expanded.extend(acc);
        }
        outputs.push(expanded);
    }
    Ok(SymPoly { in_vars: p.in_vars.clone(), out_vars: q.out_vars.clone(), outputs }.normalized())
}
