//! Finite groups as multiplication tables, automorphism groups, and the
//! normalizer correspondence.
//!
//! A [`FiniteGroup`] is an n x n multiplication table with the identity at
//! index 0; the constructor checks the group axioms outright. Groups can be
//! built from permutation generators ([`PermGroup::from_generators`], also
//! readable from JSON), and a fixed catalogue of cyclic, dihedral, symmetric
//! and alternating groups is provided for exercising the machinery.
//!
//! Automorphisms are found by backtracking over images of a small generating
//! set (candidates filtered by element order), extending each assignment by
//! breadth-first propagation of products and verifying multiplicativity on
//! the full table. Inner automorphisms, centralizers, centers, normalizers
//! and coset decompositions are computed by direct table walks.
//!
//! [`verify_normalizer_lemma`] checks, for a normal subgroup G of P with
//!   (h1) the centralizer of G in P contained in G, and
//!   (h2) the center of G trivial or cyclic,
//! that
//!   (1) the restriction Aut_G(P) -> Aut(G) is injective whenever the
//!       centralizer of G in P is trivial, and in all cases the kernel of
//!       the composite to Out(G) contains every conjugation by G (so the
//!       comparison in (3) happens between well-defined images),
//!   (2) the outer action P/G -> Out(G) has trivial kernel, which happens
//!       precisely when (h1) holds, and
//!   (3) the normalizer in Out(G) of the image of P/G equals the image of
//!       Aut_G(P) in Out(G).

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("table is not square or has out-of-range entries")]
    MalformedTable,
    #[error("index 0 is not an identity element")]
    NoIdentity,
    #[error("multiplication is not associative: ({0} {1}) {2} != {0} ({1} {2})")]
    NotAssociative(usize, usize, usize),
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("permutation {0:?} is not a bijection on 0..{1}")]
    BadPermutation(Vec<usize>, usize),
    #[error("group order {0} exceeds the cap {1}; raise the cap to proceed")]
    OrderAboveCap(usize, usize),
    #[error("the given set is not a subgroup")]
    NotASubgroup,
    #[error("the subgroup is not normal")]
    NotNormal,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("bad group description: {0}")]
    BadDescription(String),
}

/// A finite group given by its full multiplication table. Index 0 is the
/// identity. `table[a * n + b]` is the product a b.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FiniteGroup {
    pub name: String,
    n: usize,
    table: Vec<usize>,
    inv: Vec<usize>,
    labels: Vec<String>,
}

impl FiniteGroup {
    /// Validates the axioms: identity at 0, associativity, inverses.
    pub fn from_table(
        name: &str,
        table: Vec<Vec<usize>>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        let n = table.len();
        if table.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(GroupError::MalformedTable);
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let op = |a: usize, b: usize| flat[a * n + b];
        for a in 0..n {
            if op(0, a) != a || op(a, 0) != a {
                return Err(GroupError::NoIdentity);
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if op(op(a, b), c) != op(a, op(b, c)) {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| op(a, b) == 0 && op(b, a) == 0) {
                Some(b) => inv[a] = b,
                None => return Err(GroupError::NoInverse(a)),
            }
        }
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| format!("e{i}")).collect());
        assert_eq!(labels.len(), n);
        Ok(FiniteGroup { name: name.to_string(), n, table: flat, inv, labels })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.op(x, a);
            k += 1;
        }
        k
    }

    /// Conjugate x a x^-1.
    pub fn conj(&self, x: usize, a: usize) -> usize {
        self.op(self.op(x, a), self.inv[x])
    }

    /// Smallest subgroup containing the seed elements, sorted.
    pub fn subgroup_closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut set = BTreeSet::from([0]);
        let mut frontier: Vec<usize> = vec![0];
        for &s in seed {
            if set.insert(s) {
                frontier.push(s);
            }
        }
        while let Some(x) = frontier.pop() {
            let members: Vec<usize> = set.iter().copied().collect();
            for y in members {
                for z in [self.op(x, y), self.op(y, x), self.inv[x]] {
                    if set.insert(z) {
                        frontier.push(z);
                    }
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        s.contains(&0)
            && s.iter().all(|&a| s.contains(&self.inv[a]))
            && s.iter().all(|&a| s.iter().all(|&b| s.contains(&self.op(a, b))))
    }

    pub fn is_normal(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        (0..self.n).all(|x| s.iter().all(|&a| s.contains(&self.conj(x, a))))
    }

    /// Elements commuting with everything in `set`.
    pub fn centralizer(&self, set: &[usize]) -> Vec<usize> {
        (0..self.n)
            .filter(|&x| set.iter().all(|&a| self.op(x, a) == self.op(a, x)))
            .collect()
    }

    pub fn center(&self) -> Vec<usize> {
        let all: Vec<usize> = (0..self.n).collect();
        self.centralizer(&all)
    }

    /// Elements x with x S x^-1 = S.
    pub fn normalizer(&self, set: &[usize]) -> Vec<usize> {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        (0..self.n)
            .filter(|&x| s.iter().all(|&a| s.contains(&self.conj(x, a))))
            .collect()
    }

    /// Left cosets of a subgroup, each sorted, ordered by smallest member
    /// (so the subgroup itself comes first).
    pub fn left_cosets(&self, subgroup: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut cosets = Vec::new();
        for x in 0..self.n {
            if seen[x] {
                continue;
            }
            let mut coset: Vec<usize> = subgroup.iter().map(|&h| self.op(x, h)).collect();
            coset.sort_unstable();
            for &y in &coset {
                seen[y] = true;
            }
            cosets.push(coset);
        }
        cosets
    }

    /// True iff the subgroup set is generated by one of its elements.
    pub fn is_cyclic_subgroup(&self, set: &[usize]) -> bool {
        set.iter().any(|&a| self.element_order(a) == set.len())
    }

    /// A small generating set, greedy then pruned.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens: Vec<usize> = Vec::new();
        let mut closure = self.subgroup_closure(&gens);
        for x in 1..self.n {
            if closure.len() == self.n {
                break;
            }
            if !closure.binary_search(&x).is_ok() {
                gens.push(x);
                closure = self.subgroup_closure(&gens);
            }
        }
        // Prune redundant generators.
        let mut i = 0;
        while i < gens.len() {
            let mut trial = gens.clone();
            trial.remove(i);
            if self.subgroup_closure(&trial).len() == self.n {
                gens = trial;
            } else {
                i += 1;
            }
        }
        gens
    }

    /// The subgroup on `set` as a group of its own, identity first, with the
    /// inclusion map (new index -> ambient index).
    pub fn subgroup_group(&self, name: &str, set: &[usize]) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
        if !self.is_subgroup(set) {
            return Err(GroupError::NotASubgroup);
        }
        let mut new_to_old: Vec<usize> = set.to_vec();
        new_to_old.sort_unstable(); // identity 0 lands first
        let old_to_new: BTreeMap<usize, usize> =
            new_to_old.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let table: Vec<Vec<usize>> = new_to_old
            .iter()
            .map(|&a| new_to_old.iter().map(|&b| old_to_new[&self.op(a, b)]).collect())
            .collect();
        let labels = new_to_old.iter().map(|&o| self.labels[o].clone()).collect();
        Ok((FiniteGroup::from_table(name, table, Some(labels))?, new_to_old))
    }
}

/// A group homomorphism between table groups, as the image list.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct GroupHom {
    pub map: Vec<usize>,
}

impl GroupHom {
    pub fn identity(n: usize) -> Self {
        GroupHom { map: (0..n).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_homomorphism(&self, from: &FiniteGroup, to: &FiniteGroup) -> bool {
        if self.map.len() != from.order() || self.map.iter().any(|&v| v >= to.order()) {
            return false;
        }
        for a in 0..from.order() {
            for b in 0..from.order() {
                if self.map[from.op(a, b)] != to.op(self.map[a], self.map[b]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.map.len()];
        for &v in &self.map {
            if v >= seen.len() || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }

    /// (self . other)(x) = self(other(x)).
    pub fn compose(&self, other: &GroupHom) -> GroupHom {
        GroupHom { map: other.map.iter().map(|&x| self.map[x]).collect() }
    }

    pub fn invert(&self) -> GroupHom {
        let mut map = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            map[v] = i;
        }
        GroupHom { map }
    }
}

const DEFAULT_AUT_CAP: usize = 60;

/// All automorphisms of g, sorted; groups above order 60 are refused.
pub fn automorphisms(g: &FiniteGroup) -> Result<Vec<GroupHom>, GroupError> {
    automorphisms_capped(g, DEFAULT_AUT_CAP)
}

/// All automorphisms of g, with an explicit order cap.
pub fn automorphisms_capped(g: &FiniteGroup, cap: usize) -> Result<Vec<GroupHom>, GroupError> {
    let n = g.order();
    if n > cap {
        return Err(GroupError::OrderAboveCap(n, cap));
    }
    let gens = g.generating_set();
    if gens.is_empty() {
        return Ok(vec![GroupHom::identity(n)]); // trivial group
    }
    let orders: Vec<usize> = (0..n).map(|x| g.element_order(x)).collect();
    let mut found: BTreeSet<GroupHom> = BTreeSet::new();
    let mut images = vec![0usize; gens.len()];
    backtrack(g, &gens, &orders, 0, &mut images, &mut found);
    Ok(found.into_iter().collect())
}

fn backtrack(
    g: &FiniteGroup,
    gens: &[usize],
    orders: &[usize],
    pos: usize,
    images: &mut [usize],
    found: &mut BTreeSet<GroupHom>,
) {
    if pos == gens.len() {
        if let Some(map) = extend_by_products(g, gens, images) {
            let hom = GroupHom { map };
            if hom.is_bijective() && hom.is_homomorphism(g, g) {
                found.insert(hom);
            }
        }
        return;
    }
    for cand in 0..g.order() {
        // An automorphism preserves element orders.
        if orders[cand] != orders[gens[pos]] {
            continue;
        }
        images[pos] = cand;
        // Partial consistency: the assigned generators must already extend.
        if extend_by_products(g, &gens[..=pos], &images[..=pos]).is_some() {
            backtrack(g, gens, orders, pos + 1, images, found);
        }
    }
}

// Propagates images of products from the generator images: whenever a and b
// have known images, a b gets one too; a clash aborts. Returns the full map
// when every element is reached, None on clash or (for partial generator
// sets) an under-determined map with the known part consistent.
fn extend_by_products(g: &FiniteGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let n = g.order();
    let mut map: Vec<Option<usize>> = vec![None; n];
    map[0] = Some(0);
    let mut known: Vec<usize> = vec![0];
    for (&a, &im) in gens.iter().zip(images) {
        match map[a] {
            Some(v) if v != im => return None,
            Some(_) => {}
            None => {
                map[a] = Some(im);
                known.push(a);
            }
        }
    }
    let mut i = 0;
    while i < known.len() {
        let a = known[i];
        i += 1;
        for j in 0..known.len() {
            let b = known[j];
            for (p, q) in [(a, b), (b, a)] {
                let prod = g.op(p, q);
                let target = g.op(map[p].unwrap(), map[q].unwrap());
                match map[prod] {
                    Some(v) if v != target => return None,
                    Some(_) => {}
                    None => {
                        map[prod] = Some(target);
                        known.push(prod);
                    }
                }
            }
        }
    }
    if known.len() == n {
        Some(map.into_iter().map(|v| v.unwrap()).collect())
    } else if gens.len() < g.generating_set().len() {
        // Partial assignment: consistent so far.
        Some(vec![])
    } else {
        None
    }
}

/// Conjugation automorphisms, deduplicated and sorted.
pub fn inner_automorphisms(g: &FiniteGroup) -> Vec<GroupHom> {
    let mut set = BTreeSet::new();
    for x in 0..g.order() {
        set.insert(GroupHom { map: (0..g.order()).map(|a| g.conj(x, a)).collect() });
    }
    set.into_iter().collect()
}

/// The outer automorphism group as a coset table: element 0 is the class of
/// inner automorphisms. Returned with the class index of each automorphism
/// in the input list.
pub fn outer_group(
    g: &FiniteGroup,
    auts: &[GroupHom],
) -> Result<(FiniteGroup, Vec<usize>), GroupError> {
    let inner = inner_automorphisms(g);
    // Canonical key of the coset a . Inn: the smallest member.
    let coset_key = |a: &GroupHom| -> GroupHom {
        inner.iter().map(|i| a.compose(i)).min().unwrap()
    };
    let mut keys: Vec<GroupHom> = Vec::new();
    let mut class_of_aut = vec![usize::MAX; auts.len()];
    let id_key = coset_key(&GroupHom::identity(g.order()));
    keys.push(id_key);
    for (i, a) in auts.iter().enumerate() {
        let k = coset_key(a);
        let idx = match keys.iter().position(|x| *x == k) {
            Some(idx) => idx,
            None => {
                keys.push(k);
                keys.len() - 1
            }
        };
        class_of_aut[i] = idx;
    }
    // Representatives multiply; the product's class is looked up via any
    // member (all members of a coset share the key).
    let reps: Vec<&GroupHom> = keys
        .iter()
        .map(|k| {
            auts.iter()
                .find(|a| &coset_key(a) == k)
                .expect("coset without representative among automorphisms")
        })
        .collect();
    let m = keys.len();
    let mut table = vec![vec![0usize; m]; m];
    for i in 0..m {
        for j in 0..m {
            let prod = reps[i].compose(reps[j]);
            let k = coset_key(&prod);
            let Some(idx) = keys.iter().position(|x| *x == k) else {
                return Err(GroupError::NotASubgroup);
            };
            table[i][j] = idx;
        }
    }
    let labels = (0..m).map(|i| format!("[aut class {i}]")).collect();
    let out = FiniteGroup::from_table(&format!("Out({})", g.name), table, Some(labels))?;
    Ok((out, class_of_aut))
}

// ---------------------------------------------------------------------------
// Permutation groups and the catalogue.
// ---------------------------------------------------------------------------

/// A finite group realized by permutations, remembering the permutation for
/// each element index.
#[derive(Clone, Debug)]
pub struct PermGroup {
    pub group: FiniteGroup,
    perms: Vec<Vec<usize>>,
}

fn compose_perm(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            seen[start] = true;
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut x = p[start];
        while x != start {
            seen[x] = true;
            cycle.push(x);
            x = p[x];
        }
        out.push('(');
        out.push_str(
            &cycle.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
        );
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}

impl PermGroup {
    /// Closure of the generators inside the symmetric group on
    /// 0..degree. Elements are indexed with the identity first, the rest in
    /// lexicographic order of the permutation.
    pub fn from_generators(
        name: &str,
        degree: usize,
        gens: &[Vec<usize>],
    ) -> Result<Self, GroupError> {
        for p in gens {
            let mut seen = vec![false; degree];
            if p.len() != degree || p.iter().any(|&v| v >= degree || std::mem::replace(&mut seen[v], true)) {
                return Err(GroupError::BadPermutation(p.clone(), degree));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
        set.insert(id.clone());
        let mut frontier = vec![id.clone()];
        while let Some(cur) = frontier.pop() {
            for gen in gens {
                let next = compose_perm(&cur, gen);
                if set.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
        let mut perms: Vec<Vec<usize>> = set.into_iter().collect();
        // BTreeSet order is lexicographic; the identity is not necessarily
        // first, so move it there.
        let id_pos = perms.iter().position(|p| *p == id).unwrap();
        perms.swap(0, id_pos);
        perms[1..].sort();
        let index: BTreeMap<&Vec<usize>, usize> =
            perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| perms.iter().map(|b| index[&compose_perm(a, b)]).collect())
            .collect();
        let labels = perms.iter().map(|p| cycle_notation(p)).collect();
        let group = FiniteGroup::from_table(name, table, Some(labels))?;
        Ok(PermGroup { group, perms })
    }

    pub fn index_of(&self, perm: &[usize]) -> Option<usize> {
        self.perms.iter().position(|p| p == perm)
    }

    pub fn perm(&self, idx: usize) -> &[usize] {
        &self.perms[idx]
    }
}

/// JSON description of a permutation group: name, degree, generator list.
#[derive(Serialize, Deserialize)]
pub struct PermGroupSpec {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

pub fn perm_group_from_json(json: &str) -> Result<PermGroup, GroupError> {
    let spec: PermGroupSpec =
        serde_json::from_str(json).map_err(|e| GroupError::BadDescription(e.to_string()))?;
    PermGroup::from_generators(&spec.name, spec.degree, &spec.generators)
}

pub fn cyclic(n: usize) -> PermGroup {
    assert!(n >= 1);
    if n == 1 {
        return PermGroup::from_generators("C1", 1, &[]).unwrap();
    }
    let shift: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    PermGroup::from_generators(&format!("C{n}"), n, &[shift]).unwrap()
}

pub fn dihedral(n: usize) -> PermGroup {
    assert!(n >= 2);
    if n == 2 {
        // The Klein four group has no faithful action on 2 points; realize
        // it on 4 as {e, (0 1), (2 3), (0 1)(2 3)}.
        return PermGroup::from_generators("D2", 4, &[vec![1, 0, 2, 3], vec![0, 1, 3, 2]])
            .unwrap();
    }
    let rot: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
    PermGroup::from_generators(&format!("D{n}"), n, &[rot, refl]).unwrap()
}

pub fn symmetric(n: usize) -> PermGroup {
    assert!(n >= 2);
    let mut swap: Vec<usize> = (0..n).collect();
    swap.swap(0, 1);
    let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let gens = if n == 2 { vec![swap] } else { vec![swap, cycle] };
    PermGroup::from_generators(&format!("S{n}"), n, &gens).unwrap()
}

pub fn alternating(n: usize) -> PermGroup {
    assert!(n >= 3);
    let mut three: Vec<usize> = (0..n).collect();
    three[0] = 1;
    three[1] = 2;
    three[2] = 0;
    let mut gens = vec![three];
    if n > 3 {
        // A full cycle on n points is even iff n is odd; otherwise cycle the
        // last n-1 points.
        let cycle: Vec<usize> = if n % 2 == 1 {
            (0..n).map(|i| (i + 1) % n).collect()
        } else {
            (0..n).map(|i| if i == 0 { 0 } else { i % (n - 1) + 1 }).collect()
        };
        gens.push(cycle);
    }
    PermGroup::from_generators(&format!("A{n}"), n, &gens).unwrap()
}

/// The full test catalogue: C1..C12, D2..D6, S2..S5, A3..A5.
pub fn catalogue() -> Vec<FiniteGroup> {
    let mut out = Vec::new();
    for n in 1..=12 {
        out.push(cyclic(n).group);
    }
    for n in 2..=6 {
        out.push(dihedral(n).group);
    }
    for n in 2..=5 {
        out.push(symmetric(n).group);
    }
    for n in 3..=5 {
        out.push(alternating(n).group);
    }
    out
}

/// The catalogue members of order at most `max`.
pub fn catalogue_up_to(max: usize) -> Vec<FiniteGroup> {
    catalogue().into_iter().filter(|g| g.order() <= max).collect()
}

// ---------------------------------------------------------------------------
// The normalizer correspondence.
// ---------------------------------------------------------------------------

/// Everything `verify_normalizer_lemma` measures. Orders are group orders;
/// part (3) compares two subgroups of the outer automorphism group.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalizerLemmaReport {
    pub pi_name: String,
    pub pi_order: usize,
    pub gamma_order: usize,
    pub centralizer_in_gamma: bool,
    pub centralizer_trivial: bool,
    pub center_of_gamma_cyclic_or_trivial: bool,
    pub aut_gamma_order: usize,
    pub out_gamma_order: usize,
    pub restriction_injective: bool,
    pub restriction_kernel_contains_conjugation_by_gamma: bool,
    pub outer_action_kernel_trivial: bool,
    pub outer_action_matches_centralizer_criterion: bool,
    pub normalizer_order: usize,
    pub restriction_image_order: usize,
    pub normalizer_equals_restriction_image: bool,
}

impl NormalizerLemmaReport {
    /// All three verified statements hold. Raw injectivity in part (1) is
    /// only promised when the centralizer of gamma in pi is trivial; pairs
    /// like (S3, C3) have central conjugations that restrict to the identity.
    pub fn all_pass(&self) -> bool {
        (!self.centralizer_trivial || self.restriction_injective)
            && self.restriction_kernel_contains_conjugation_by_gamma
            && self.outer_action_kernel_trivial
            && self.outer_action_matches_centralizer_criterion
            && self.normalizer_equals_restriction_image
    }
}

/// The kernel-triviality side of part (2) on its own: does any coset of
/// gamma other than gamma itself act on gamma by inner automorphisms?
/// Computable without the lemma's hypotheses; used to exercise the
/// equivalence with the centralizer criterion on pairs the lemma rejects.
pub fn outer_action_kernel_trivial(
    pi: &FiniteGroup,
    gamma: &[usize],
) -> Result<bool, GroupError> {
    if !pi.is_subgroup(gamma) {
        return Err(GroupError::NotASubgroup);
    }
    if !pi.is_normal(gamma) {
        return Err(GroupError::NotNormal);
    }
    let (gamma_grp, new_to_old) = pi.subgroup_group("gamma", gamma)?;
    let old_to_new: BTreeMap<usize, usize> =
        new_to_old.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    let inner: BTreeSet<GroupHom> = inner_automorphisms(&gamma_grp).into_iter().collect();
    let gamma_set: BTreeSet<usize> = gamma.iter().copied().collect();
    for coset in pi.left_cosets(gamma) {
        let rep = coset[0];
        if gamma_set.contains(&rep) {
            continue;
        }
        let action = GroupHom {
            map: new_to_old.iter().map(|&o| old_to_new[&pi.conj(rep, o)]).collect(),
        };
        if inner.contains(&action) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Verifies the normalizer correspondence for the normal subgroup `gamma`
/// of `pi`; see the module docs for the statements. Rejects pairs violating
/// the hypotheses with a diagnostic.
pub fn verify_normalizer_lemma(
    pi: &FiniteGroup,
    gamma: &[usize],
) -> Result<NormalizerLemmaReport, GroupError> {
    if !pi.is_subgroup(gamma) {
        return Err(GroupError::NotASubgroup);
    }
    if !pi.is_normal(gamma) {
        return Err(GroupError::NotNormal);
    }
    let gamma_set: BTreeSet<usize> = gamma.iter().copied().collect();

    // Hypotheses.
    let centralizer = pi.centralizer(gamma);
    let h1 = centralizer.iter().all(|x| gamma_set.contains(x));
    let center_of_gamma: Vec<usize> = centralizer
        .iter()
        .copied()
        .filter(|x| gamma_set.contains(x))
        .collect();
    let h2 = center_of_gamma.len() == 1 || pi.is_cyclic_subgroup(&center_of_gamma);
    if !h1 {
        return Err(GroupError::HypothesisViolated(format!(
            "the centralizer of gamma in {} has order {} and is not contained in gamma",
            pi.name,
            centralizer.len()
        )));
    }
    if !h2 {
        return Err(GroupError::HypothesisViolated(format!(
            "Z_gamma(gamma) has order {} and is neither trivial nor cyclic",
            center_of_gamma.len()
        )));
    }

    let (gamma_grp, new_to_old) = pi.subgroup_group("gamma", gamma)?;
    let old_to_new: BTreeMap<usize, usize> =
        new_to_old.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    let aut_gamma = automorphisms_capped(&gamma_grp, gamma_grp.order())?;
    let aut_gamma_index: BTreeMap<&GroupHom, usize> =
        aut_gamma.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let (out_grp, class_of_aut) = outer_group(&gamma_grp, &aut_gamma)?;

    // Automorphisms of pi preserving gamma setwise, and their restrictions.
    let aut_pi = automorphisms_capped(pi, pi.order())?;
    let stabilizing: Vec<&GroupHom> = aut_pi
        .iter()
        .filter(|a| gamma.iter().all(|&x| gamma_set.contains(&a.map[x])))
        .collect();
    let restrict = |a: &GroupHom| -> GroupHom {
        GroupHom { map: new_to_old.iter().map(|&o| old_to_new[&a.map[o]]).collect() }
    };

    // Part (1).
    let trivial_restrictions = stabilizing
        .iter()
        .filter(|a| restrict(a).is_identity())
        .count();
    let restriction_injective = trivial_restrictions == 1;
    let kernel_to_out: BTreeSet<Vec<usize>> = stabilizing
        .iter()
        .filter(|a| class_of_aut[aut_gamma_index[&restrict(a)]] == 0)
        .map(|a| a.map.clone())
        .collect();
    let conj_by_gamma: BTreeSet<Vec<usize>> = gamma
        .iter()
        .map(|&gel| (0..pi.order()).map(|x| pi.conj(gel, x)).collect())
        .collect();
    let restriction_kernel_contains_conjugation_by_gamma =
        conj_by_gamma.is_subset(&kernel_to_out);

    // Part (2).
    let outer_action_kernel_trivial = outer_action_kernel_trivial(pi, gamma)?;
    let outer_action_matches_centralizer_criterion = outer_action_kernel_trivial == h1;

    // Part (3): image of pi/gamma in Out, its normalizer, and the image of
    // the stabilizing automorphisms.
    let mut image_of_quotient: BTreeSet<usize> = BTreeSet::new();
    for coset in pi.left_cosets(gamma) {
        let rep = coset[0];
        let action = GroupHom {
            map: new_to_old.iter().map(|&o| old_to_new[&pi.conj(rep, o)]).collect(),
        };
        image_of_quotient.insert(class_of_aut[aut_gamma_index[&action]]);
    }
    let q: Vec<usize> = image_of_quotient.iter().copied().collect();
    let normalizer: BTreeSet<usize> = out_grp.normalizer(&q).into_iter().collect();
    let restriction_image: BTreeSet<usize> = stabilizing
        .iter()
        .map(|a| class_of_aut[aut_gamma_index[&restrict(a)]])
        .collect();

    Ok(NormalizerLemmaReport {
        pi_name: pi.name.clone(),
        pi_order: pi.order(),
        gamma_order: gamma.len(),
        centralizer_in_gamma: h1,
        centralizer_trivial: centralizer.len() == 1,
        center_of_gamma_cyclic_or_trivial: h2,
        aut_gamma_order: aut_gamma.len(),
        out_gamma_order: out_grp.order(),
        restriction_injective,
        restriction_kernel_contains_conjugation_by_gamma,
        outer_action_kernel_trivial,
        outer_action_matches_centralizer_criterion,
        normalizer_order: normalizer.len(),
        restriction_image_order: restriction_image.len(),
        normalizer_equals_restriction_image: normalizer == restriction_image,
    })
}
