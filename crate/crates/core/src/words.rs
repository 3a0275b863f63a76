//! Free-group word calculus.
//!
//! Words are stored run-length encoded and always freely reduced, so the
//! identity test is O(1) and abelianization is a cheap run scan. On top of the
//! word arithmetic this module provides:
//!
//! - the surface boundary word delta = \[a1,b1\]\[a2,b2\]...\[ag,bg\] (length 4g),
//! - presentation bookkeeping for degree d: genus g = (d-2)/2 (d even) or
//!   (d-1)/2 (d odd), with the index map a_i -> x_{2i+1}, b_i -> x_{2i+2}
//!   (d even) and a_i -> x_{2i}, b_i -> x_{2i+1} (d odd),
//! - the twist family of substitution automorphisms
//!     phi_i:   b_i -> b_i a_i
//!     phi'_i:  a_i -> a_i b_i^-1
//!     phi''_i: a_i   -> a_i b_i^-1 a_{i+1} b_{i+1} a_{i+1}^-1
//!              b_i   -> a_{i+1} b_{i+1}^-1 a_{i+1}^-1 b_i a_{i+1} b_{i+1} a_{i+1}^-1
//!              a_{i+1} -> a_{i+1} b_{i+1}^-1 a_{i+1}^-1 b_i a_{i+1}
//!     phi (d even only): x_2 -> x_2 x_1
//!   each fixing every generator not named in its defining equalities. The
//!   generators sigma, tau, x_0 (and x_1, x_2 where fixed) ride along as inert
//!   symbols fixed by every family member; no relation involving them is
//!   checked at word level.
//!
//! Text form: a word prints as space-separated runs like `a1 b1 a1^-1 b1^-1`
//! (`1` is the empty word); an endomorphism prints as `gen -> word` lines.
//! Parsing is the exact inverse of printing.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A generator symbol. `X(j)` are presentation generators (0-based), `A(i)`
/// and `B(i)` the surface generators (1-based), `C` the boundary generator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Gen {
    Sigma,
    Tau,
    X(u32),
    A(u32),
    B(u32),
    C,
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Sigma => write!(f, "sigma"),
            Gen::Tau => write!(f, "tau"),
            Gen::X(i) => write!(f, "x{i}"),
            Gen::A(i) => write!(f, "a{i}"),
            Gen::B(i) => write!(f, "b{i}"),
            Gen::C => write!(f, "c"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("generator {0} is outside the endomorphism's domain")]
    OutsideDomain(Gen),
    #[error("genus must be at least 1, got {0}")]
    GenusTooSmall(u32),
    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(u32),
    #[error("parse error: {0}")]
    Parse(String),
}

/// A freely reduced word, run-length encoded: adjacent runs carry distinct
/// generators and every exponent is nonzero. The empty run list is the
/// identity.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Word {
    runs: Vec<(Gen, i64)>,
}

impl Word {
    /// The empty word.
    pub fn identity() -> Self {
        Word { runs: Vec::new() }
    }

    /// Single-generator word g^1.
    pub fn gen(g: Gen) -> Self {
        Word { runs: vec![(g, 1)] }
    }

    /// g^k (identity for k = 0).
    pub fn gen_pow(g: Gen, k: i64) -> Self {
        if k == 0 {
            Word::identity()
        } else {
            Word { runs: vec![(g, k)] }
        }
    }

    /// Builds a word from arbitrary (generator, exponent) runs, freely
    /// reducing. This is the canonicalization entry point: the result is the
    /// unique reduced form, independent of how cancellations interleave.
    pub fn new<I: IntoIterator<Item = (Gen, i64)>>(runs: I) -> Self {
        let mut w = Word::identity();
        for (g, k) in runs {
            w.push_run(g, k);
        }
        w
    }

    // Appends g^k, merging with the trailing run and cascading cancellations.
    fn push_run(&mut self, g: Gen, k: i64) {
        if k == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some((h, e)) if *h == g => {
                *e += k;
                if *e == 0 {
                    self.runs.pop();
                }
            }
            _ => self.runs.push((g, k)),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    /// Reduced word length (sum of |exponent| over runs).
    pub fn len(&self) -> u64 {
        self.runs.iter().map(|(_, k)| k.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn runs(&self) -> &[(Gen, i64)] {
        &self.runs
    }

    /// Exponent sum per generator (the abelianization of the word).
    pub fn exponent_sums(&self) -> BTreeMap<Gen, i64> {
        let mut out: BTreeMap<Gen, i64> = BTreeMap::new();
        for &(g, k) in &self.runs {
            *out.entry(g).or_insert(0) += k;
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// The set of generators occurring in the word.
    pub fn support(&self) -> impl Iterator<Item = Gen> + '_ {
        self.runs.iter().map(|&(g, _)| g)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { invert(self) } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = multiply(&out, &base);
        }
        out
    }
}

/// Returns the freely reduced form of a word. Words are kept reduced by
/// construction, so this is the identity map; it exists so callers can state
/// intent when normalizing data that arrives as raw runs.
pub fn free_reduce(w: &Word) -> Word {
    w.clone()
}

/// Product uv, reduced.
pub fn multiply(u: &Word, v: &Word) -> Word {
    let mut out = u.clone();
    for &(g, k) in &v.runs {
        out.push_run(g, k);
    }
    out
}

/// w^-1: reversed runs with negated exponents (already reduced).
pub fn invert(w: &Word) -> Word {
    Word {
        runs: w.runs.iter().rev().map(|&(g, k)| (g, -k)).collect(),
    }
}

/// \[u, v\] = u v u^-1 v^-1, reduced.
pub fn commutator(u: &Word, v: &Word) -> Word {
    multiply(&multiply(u, v), &multiply(&invert(u), &invert(v)))
}

/// A substitution endomorphism: a total map from a fixed generator set to
/// words. Equality of endomorphisms is extensional (same domain, same image
/// per generator); the name is bookkeeping for reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Endomorphism {
    pub name: String,
    images: BTreeMap<Gen, Word>,
}

impl Endomorphism {
    pub fn identity(name: &str, domain: &[Gen]) -> Self {
        Endomorphism {
            name: name.to_string(),
            images: domain.iter().map(|&g| (g, Word::gen(g))).collect(),
        }
    }

    pub fn from_images(name: &str, images: BTreeMap<Gen, Word>) -> Self {
        Endomorphism {
            name: name.to_string(),
            images,
        }
    }

    pub fn domain(&self) -> impl Iterator<Item = Gen> + '_ {
        self.images.keys().copied()
    }

    pub fn image(&self, g: Gen) -> Option<&Word> {
        self.images.get(&g)
    }

    /// Replaces generator g's image (building block for the twist family).
    pub fn set_image(&mut self, g: Gen, w: Word) {
        self.images.insert(g, w);
    }

    /// Applies the substitution to a word; the result is reduced. Errors if
    /// the word uses a generator outside the domain.
    pub fn apply(&self, w: &Word) -> Result<Word, WordError> {
        let mut out = Word::identity();
        for &(g, k) in w.runs() {
            let img = self.images.get(&g).ok_or(WordError::OutsideDomain(g))?;
            out = multiply(&out, &img.pow(k));
        }
        Ok(out)
    }

    /// Extensional equality: same domain and same image on every generator.
    pub fn eq_extensional(&self, other: &Endomorphism) -> bool {
        self.images == other.images
    }

    /// True iff the endomorphism maps every generator to itself.
    pub fn is_identity(&self) -> bool {
        self.images.iter().all(|(&g, w)| *w == Word::gen(g))
    }
}

/// compose(e1, e2) acts as w -> e1(e2(w)). The domain is e2's domain; every
/// image of e2 must stay inside e1's domain.
pub fn compose(e1: &Endomorphism, e2: &Endomorphism) -> Result<Endomorphism, WordError> {
    let mut images = BTreeMap::new();
    for (&g, w) in &e2.images {
        images.insert(g, e1.apply(w)?);
    }
    Ok(Endomorphism {
        name: format!("{} . {}", e1.name, e2.name),
        images,
    })
}

/// The boundary word delta = \[a1,b1\]\[a2,b2\]...\[ag,bg\] over the surface
/// generators, reduced, of length 4g.
pub fn boundary_word(g: u32) -> Result<Word, WordError> {
    if g < 1 {
        return Err(WordError::GenusTooSmall(g));
    }
    let mut delta = Word::identity();
    for i in 1..=g {
        let c = commutator(&Word::gen(Gen::A(i)), &Word::gen(Gen::B(i)));
        delta = multiply(&delta, &c);
    }
    Ok(delta)
}

/// Presentation bookkeeping for degree d >= 2: derived genus, parity, the
/// index map between surface generators and x-generators, and the inert
/// generator list.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PresentationSpec {
    pub d: u32,
    pub g: u32,
}

impl PresentationSpec {
    pub fn new(d: u32) -> Result<Self, WordError> {
        if d < 2 {
            return Err(WordError::DegreeTooSmall(d));
        }
        let g = if d % 2 == 0 { (d - 2) / 2 } else { (d - 1) / 2 };
        Ok(PresentationSpec { d, g })
    }

    pub fn is_even(&self) -> bool {
        self.d % 2 == 0
    }

    /// x-generator playing the role of a_i (1 <= i <= g).
    pub fn a_gen(&self, i: u32) -> Gen {
        debug_assert!(1 <= i && i <= self.g);
        if self.is_even() {
            Gen::X(2 * i + 1)
        } else {
            Gen::X(2 * i)
        }
    }

    /// x-generator playing the role of b_i (1 <= i <= g).
    pub fn b_gen(&self, i: u32) -> Gen {
        debug_assert!(1 <= i && i <= self.g);
        if self.is_even() {
            Gen::X(2 * i + 2)
        } else {
            Gen::X(2 * i + 1)
        }
    }

    /// All generators of the presentation: sigma, tau, x0..xd.
    pub fn all_gens(&self) -> Vec<Gen> {
        let mut v = vec![Gen::Sigma, Gen::Tau];
        v.extend((0..=self.d).map(Gen::X));
        v
    }

    /// Generators fixed by every family member: sigma, tau and the x_j not
    /// assigned a surface role (x0, x1 always; x2 too when d is even, though
    /// phi moves it).
    pub fn inert_gens(&self) -> Vec<Gen> {
        let mut v = vec![Gen::Sigma, Gen::Tau, Gen::X(0), Gen::X(1)];
        if self.is_even() {
            v.push(Gen::X(2));
        }
        v
    }

    /// The surface basis (a1, b1, ..., ag, bg) as x-generators, interleaved.
    pub fn surface_basis(&self) -> Vec<Gen> {
        let mut v = Vec::with_capacity(2 * self.g as usize);
        for i in 1..=self.g {
            v.push(self.a_gen(i));
            v.push(self.b_gen(i));
        }
        v
    }

    /// The coordinate basis (x1, ..., xd) used for d-dimensional
    /// abelianizations.
    pub fn y_basis(&self) -> Vec<Gen> {
        (1..=self.d).map(Gen::X).collect()
    }

    /// The boundary word written in x-generators via the index map.
    pub fn boundary_word_x(&self) -> Word {
        let mut delta = Word::identity();
        for i in 1..=self.g {
            let c = commutator(&Word::gen(self.a_gen(i)), &Word::gen(self.b_gen(i)));
            delta = multiply(&delta, &c);
        }
        delta
    }
}

/// The twist family for degree d, as endomorphisms of the full generator set
/// (sigma, tau, x0..xd). Ordering: phi (d even), then phi_1..phi_g,
/// phi'_1..phi'_g, phi''_1..phi''_{g-1}. For d = 2 the family is {phi} only.
pub fn twist_family(spec: &PresentationSpec) -> Vec<Endomorphism> {
    let domain = spec.all_gens();
    let mut family = Vec::new();

    if spec.is_even() {
        let mut phi = Endomorphism::identity("phi", &domain);
        phi.set_image(
            Gen::X(2),
            multiply(&Word::gen(Gen::X(2)), &Word::gen(Gen::X(1))),
        );
        family.push(phi);
    }

    for i in 1..=spec.g {
        let (a, b) = (spec.a_gen(i), spec.b_gen(i));
        let mut phi_i = Endomorphism::identity(&format!("phi_{i}"), &domain);
        phi_i.set_image(b, multiply(&Word::gen(b), &Word::gen(a)));
        family.push(phi_i);
    }

    for i in 1..=spec.g {
        let (a, b) = (spec.a_gen(i), spec.b_gen(i));
        let mut phi_p = Endomorphism::identity(&format!("phi'_{i}"), &domain);
        phi_p.set_image(a, multiply(&Word::gen(a), &Word::gen_pow(b, -1)));
        family.push(phi_p);
    }

    for i in 1..spec.g {
        let (a, b) = (spec.a_gen(i), spec.b_gen(i));
        let (a1, b1) = (spec.a_gen(i + 1), spec.b_gen(i + 1));
        let mut phi_pp = Endomorphism::identity(&format!("phi''_{i}"), &domain);
        // a_i -> a_i b_i^-1 a_{i+1} b_{i+1} a_{i+1}^-1
        phi_pp.set_image(
            a,
            Word::new([(a, 1), (b, -1), (a1, 1), (b1, 1), (a1, -1)]),
        );
        // b_i -> a_{i+1} b_{i+1}^-1 a_{i+1}^-1 b_i a_{i+1} b_{i+1} a_{i+1}^-1
        phi_pp.set_image(
            b,
            Word::new([(a1, 1), (b1, -1), (a1, -1), (b, 1), (a1, 1), (b1, 1), (a1, -1)]),
        );
        // a_{i+1} -> a_{i+1} b_{i+1}^-1 a_{i+1}^-1 b_i a_{i+1}
        phi_pp.set_image(
            a1,
            Word::new([(a1, 1), (b1, -1), (a1, -1), (b, 1), (a1, 1)]),
        );
        family.push(phi_pp);
    }

    family
}

/// True iff e fixes the boundary word delta of genus g. e must be defined on
/// the surface generators a1..ag, b1..bg.
pub fn fixes_delta(e: &Endomorphism, g: u32) -> Result<bool, WordError> {
    let delta = boundary_word(g)?;
    Ok(e.apply(&delta)? == delta)
}

/// True iff e fixes the boundary word written in x-generators via the index
/// map of the presentation (the identification under which the twist family
/// acts on the surface).
pub fn fixes_delta_under(spec: &PresentationSpec, e: &Endomorphism) -> Result<bool, WordError> {
    let delta = spec.boundary_word_x();
    Ok(e.apply(&delta)? == delta)
}

/// The twist family written directly on the surface generators a1..ag,
/// b1..bg (no inert symbols, no phi). Same formulas as `twist_family` under
/// the index map; used where only the surface action matters.
pub fn surface_twist_family(g: u32) -> Result<Vec<Endomorphism>, WordError> {
    if g < 1 {
        return Err(WordError::GenusTooSmall(g));
    }
    // Genus g occurs for odd d = 2g+1; relabel that family's x-generators.
    let spec = PresentationSpec::new(2 * g + 1)?;
    let relabel = |w: &Word| -> Word {
        Word::new(w.runs().iter().map(|&(x, k)| {
            for i in 1..=g {
                if x == spec.a_gen(i) {
                    return (Gen::A(i), k);
                }
                if x == spec.b_gen(i) {
                    return (Gen::B(i), k);
                }
            }
            unreachable!("twist image strayed outside the surface block: {x}");
        }))
    };
    let mut domain = Vec::new();
    for i in 1..=g {
        domain.push(Gen::A(i));
        domain.push(Gen::B(i));
    }
    let mut out = Vec::new();
    for e in twist_family(&spec) {
        let mut s = Endomorphism::identity(&e.name, &domain);
        for i in 1..=g {
            s.set_image(Gen::A(i), relabel(e.image(spec.a_gen(i)).unwrap()));
            s.set_image(Gen::B(i), relabel(e.image(spec.b_gen(i)).unwrap()));
        }
        out.push(s);
    }
    Ok(out)
}

/// Finds an inverse for a twist-family member: first tries the formal inverse
/// candidates (the same substitutions along the inverted twist word), then
/// falls back to a bounded search over compositions of the family and those
/// candidates. The returned endomorphism is verified extensionally: both
/// compositions act as the identity on every generator.
pub fn family_inverse(spec: &PresentationSpec, e: &Endomorphism) -> Option<Endomorphism> {
    let domain = spec.all_gens();
    let mut candidates: Vec<Endomorphism> = Vec::new();

    if spec.is_even() {
        let mut inv = Endomorphism::identity("phi^-1", &domain);
        inv.set_image(Gen::X(2), Word::new([(Gen::X(2), 1), (Gen::X(1), -1)]));
        candidates.push(inv);
    }
    for i in 1..=spec.g {
        let (a, b) = (spec.a_gen(i), spec.b_gen(i));
        let mut inv = Endomorphism::identity(&format!("phi_{i}^-1"), &domain);
        inv.set_image(b, Word::new([(b, 1), (a, -1)]));
        candidates.push(inv);
        let mut inv = Endomorphism::identity(&format!("phi'_{i}^-1"), &domain);
        inv.set_image(a, Word::new([(a, 1), (b, 1)]));
        candidates.push(inv);
    }
    for i in 1..spec.g {
        // phi''_i is the twist a_i -> a_i w, b_i -> w^-1 b_i w,
        // a_{i+1} -> w^-1 a_{i+1} along w = b_i^-1 a_{i+1} b_{i+1} a_{i+1}^-1;
        // the formal inverse is the same pattern along w^-1.
        let (a, b) = (spec.a_gen(i), spec.b_gen(i));
        let (a1, b1) = (spec.a_gen(i + 1), spec.b_gen(i + 1));
        let w = Word::new([(b, -1), (a1, 1), (b1, 1), (a1, -1)]);
        let winv = invert(&w);
        let mut inv = Endomorphism::identity(&format!("phi''_{i}^-1"), &domain);
        inv.set_image(a, multiply(&Word::gen(a), &winv));
        inv.set_image(b, multiply(&multiply(&w, &Word::gen(b)), &winv));
        inv.set_image(a1, multiply(&w, &Word::gen(a1)));
        candidates.push(inv);
    }

    let verifies = |cand: &Endomorphism| -> bool {
        let both = [compose(cand, e), compose(e, cand)];
        both.into_iter()
            .all(|c| c.map(|c| c.is_identity()).unwrap_or(false))
    };

    for cand in &candidates {
        if verifies(cand) {
            return Some(cand.clone());
        }
    }

    // Bounded search: compositions of family members and candidates, depth <= 3.
    let mut pool = twist_family(spec);
    pool.extend(candidates);
    let mut frontier: Vec<Endomorphism> = pool.clone();
    for _ in 1..3 {
        let mut next = Vec::new();
        for f in &frontier {
            for p in &pool {
                if let Ok(c) = compose(f, p) {
                    if verifies(&c) {
                        return Some(c);
                    }
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    None
}

// ---------------------------------------------------------------------------
// Text serialization.
// ---------------------------------------------------------------------------

impl fmt::Display for Word {
    /// Space-separated runs, `gen` or `gen^k`; the empty word prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(g, k) in &self.runs {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if k == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{k}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Gen {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WordError::Parse(format!("unknown generator `{s}`"));
        match s {
            "sigma" => return Ok(Gen::Sigma),
            "tau" => return Ok(Gen::Tau),
            "c" => return Ok(Gen::C),
            _ => {}
        }
        let (head, digits) = s.split_at(1);
        let idx: u32 = digits.parse().map_err(|_| bad())?;
        match head {
            "x" => Ok(Gen::X(idx)),
            "a" if idx >= 1 => Ok(Gen::A(idx)),
            "b" if idx >= 1 => Ok(Gen::B(idx)),
            _ => Err(bad()),
        }
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::identity());
        }
        let mut runs = Vec::new();
        for tok in s.split_whitespace() {
            let (gen, exp) = match tok.split_once('^') {
                Some((g, e)) => {
                    let exp: i64 = e
                        .parse()
                        .map_err(|_| WordError::Parse(format!("bad exponent in `{tok}`")))?;
                    (g, exp)
                }
                None => (tok, 1),
            };
            if exp == 0 {
                return Err(WordError::Parse(format!("zero exponent in `{tok}`")));
            }
            runs.push((gen.parse::<Gen>()?, exp));
        }
        Ok(Word::new(runs))
    }
}

impl fmt::Display for Endomorphism {
    /// One `gen -> word` line per generator, in generator order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, w) in &self.images {
            writeln!(f, "{g} -> {w}")?;
        }
        Ok(())
    }
}

impl FromStr for Endomorphism {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut images = BTreeMap::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (g, w) = line
                .split_once("->")
                .ok_or_else(|| WordError::Parse(format!("missing `->` in `{line}`")))?;
            images.insert(g.trim().parse::<Gen>()?, w.trim().parse::<Word>()?);
        }
        Ok(Endomorphism::from_images("parsed", images))
    }
}
