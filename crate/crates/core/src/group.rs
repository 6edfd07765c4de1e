//! Concrete computable models of finitely generated groups.
//!
//! Every bundled model has decidable equality, a symmetric generating set
//! and a shortlex-geodesic normal form, which is the fixed bridge used to
//! turn group elements into words wherever an almost action needs one.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{LabeledGraph, RootedBall};

pub const DEFAULT_BALL_CAP: usize = 1_000_000;

/// One letter of a word: a generator index plus an inversion flag.
/// The derived order (index first, plain before inverse) is the letter
/// order used by shortlex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u16,
    pub inv: bool,
}

impl Letter {
    pub fn plain(gen: u16) -> Self {
        Letter { gen, inv: false }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            inv: !self.inv,
        }
    }
}

/// A finite word over a generating set and its formal inverses.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Free reduction: cancels adjacent `s s^-1` pairs.
    pub fn reduced(&self) -> Word {
        let mut stack: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if stack.last().is_some_and(|t| *t == l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word { letters: stack }
    }

    /// Parses a whitespace-separated word such as `a b a^-1`.
    pub fn parse(gens: &GeneratingSet, text: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            let (name, inv) = match tok.strip_suffix("^-1") {
                Some(base) => (base, true),
                None => (tok, false),
            };
            let gen = gens
                .index_of(name)
                .ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
            letters.push(Letter { gen, inv });
        }
        Ok(Word { letters })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let mut first = true;
        for l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}", l.gen)?;
            if l.inv {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// An ordered one-sided list of generator names; the symmetric closure
/// (formal inverses) is always taken internally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    names: Vec<String>,
}

impl GeneratingSet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::invalid("generating set must be nonempty"));
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::invalid("generator names must be distinct"));
        }
        Ok(GeneratingSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, gen: u16) -> &str {
        &self.names[gen as usize]
    }

    pub fn index_of(&self, name: &str) -> Option<u16> {
        self.names.iter().position(|n| n == name).map(|i| i as u16)
    }

    /// All letters of the symmetric closure, in shortlex letter order.
    pub fn symmetric_letters(&self) -> Vec<Letter> {
        (0..self.names.len() as u16)
            .flat_map(|g| [Letter::plain(g), Letter::plain(g).inverse()])
            .collect()
    }
}

fn default_names(count: usize) -> Vec<String> {
    (0..count)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("g{i}")
            }
        })
        .collect()
}

/// A group element in the canonical representation of its model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// Integer vector, for free abelian groups.
    Vector(Vec<i64>),
    /// Freely reduced word, for free groups.
    Reduced(Vec<Letter>),
    /// Residue vector, for powers of a finite cyclic group.
    Residues(Vec<u64>),
    /// Permutation of `{0..m-1}` in image form, for symmetric groups.
    Perm(Vec<u8>),
    /// One element per factor, for direct products.
    Tuple(Vec<Element>),
}

#[derive(Debug, Clone)]
pub enum GroupKind {
    FreeAbelian { rank: usize },
    FreeGroup { rank: usize },
    FiniteCyclicPower { modulus: u64, rank: usize },
    SymmetricGroup { degree: usize },
    DirectProduct { factors: Vec<GroupModel> },
}

type ShortlexTable = HashMap<Vec<u8>, Vec<Letter>>;

/// A finitely generated group with computable multiplication, decidable
/// equality and a shortlex-geodesic normal form.
#[derive(Debug, Clone)]
pub struct GroupModel {
    kind: GroupKind,
    gens: GeneratingSet,
    /// Shortlex words for every element; only symmetric groups need one.
    shortlex: Option<Arc<ShortlexTable>>,
}

impl GroupModel {
    pub fn free_abelian(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::invalid("free abelian rank must be positive"));
        }
        Ok(GroupModel {
            kind: GroupKind::FreeAbelian { rank },
            gens: GeneratingSet::new(default_names(rank))?,
            shortlex: None,
        })
    }

    pub fn free_group(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::invalid("free rank must be positive"));
        }
        Ok(GroupModel {
            kind: GroupKind::FreeGroup { rank },
            gens: GeneratingSet::new(default_names(rank))?,
            shortlex: None,
        })
    }

    pub fn finite_cyclic_power(modulus: u64, rank: usize) -> Result<Self> {
        if modulus < 2 || rank == 0 {
            return Err(Error::invalid("need modulus >= 2 and positive rank"));
        }
        Ok(GroupModel {
            kind: GroupKind::FiniteCyclicPower { modulus, rank },
            gens: GeneratingSet::new(default_names(rank))?,
            shortlex: None,
        })
    }

    /// Symmetric group on `degree` points, generated by the transposition
    /// `t = (0 1)` and (for degree >= 3) the full cycle `c`.
    pub fn symmetric_group(degree: usize) -> Result<Self> {
        if !(2..=8).contains(&degree) {
            return Err(Error::invalid(
                "symmetric group degree must be in 2..=8 (normal forms are tabulated)",
            ));
        }
        let names = if degree == 2 {
            vec!["t".to_string()]
        } else {
            vec!["t".to_string(), "c".to_string()]
        };
        let gens = GeneratingSet::new(names)?;
        let mut model = GroupModel {
            kind: GroupKind::SymmetricGroup { degree },
            gens,
            shortlex: None,
        };
        model.shortlex = Some(Arc::new(model.build_shortlex_table()));
        Ok(model)
    }

    pub fn direct_product(factors: Vec<GroupModel>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("direct product needs at least one factor"));
        }
        let mut names = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            for n in f.gens.names() {
                names.push(format!("{n}{i}"));
            }
        }
        Ok(GroupModel {
            kind: GroupKind::DirectProduct { factors },
            gens: GeneratingSet::new(names)?,
            shortlex: None,
        })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn generating_set(&self) -> &GeneratingSet {
        &self.gens
    }

    pub fn identity(&self) -> Element {
        match &self.kind {
            GroupKind::FreeAbelian { rank } => Element::Vector(vec![0; *rank]),
            GroupKind::FreeGroup { .. } => Element::Reduced(Vec::new()),
            GroupKind::FiniteCyclicPower { rank, .. } => Element::Residues(vec![0; *rank]),
            GroupKind::SymmetricGroup { degree } => {
                Element::Perm((0..*degree as u8).collect())
            }
            GroupKind::DirectProduct { factors } => {
                Element::Tuple(factors.iter().map(|f| f.identity()).collect())
            }
        }
    }

    /// Image of a plain generator.
    pub fn generator_element(&self, gen: u16) -> Element {
        match &self.kind {
            GroupKind::FreeAbelian { rank } => {
                let mut v = vec![0; *rank];
                v[gen as usize] = 1;
                Element::Vector(v)
            }
            GroupKind::FreeGroup { .. } => Element::Reduced(vec![Letter::plain(gen)]),
            GroupKind::FiniteCyclicPower { rank, .. } => {
                let mut v = vec![0; *rank];
                v[gen as usize] = 1;
                Element::Residues(v)
            }
            GroupKind::SymmetricGroup { degree } => {
                let m = *degree;
                let mut img: Vec<u8> = (0..m as u8).collect();
                if gen == 0 {
                    img.swap(0, 1);
                } else {
                    for (i, slot) in img.iter_mut().enumerate() {
                        *slot = ((i + 1) % m) as u8;
                    }
                }
                Element::Perm(img)
            }
            GroupKind::DirectProduct { factors } => {
                let mut idx = gen as usize;
                let mut parts = Vec::with_capacity(factors.len());
                for f in factors {
                    let k = f.gens.len();
                    if idx < k {
                        parts.push(f.generator_element(idx as u16));
                        idx = usize::MAX; // consumed
                    } else {
                        parts.push(f.identity());
                        if idx != usize::MAX {
                            idx -= k;
                        }
                    }
                }
                Element::Tuple(parts)
            }
        }
    }

    /// Group multiplication, `a` then `b` in word order.
    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        match (&self.kind, a, b) {
            (GroupKind::FreeAbelian { .. }, Element::Vector(x), Element::Vector(y)) => {
                Element::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupKind::FreeGroup { .. }, Element::Reduced(x), Element::Reduced(y)) => {
                let mut stack = x.clone();
                for &l in y {
                    if stack.last().is_some_and(|t| *t == l.inverse()) {
                        stack.pop();
                    } else {
                        stack.push(l);
                    }
                }
                Element::Reduced(stack)
            }
            (
                GroupKind::FiniteCyclicPower { modulus, .. },
                Element::Residues(x),
                Element::Residues(y),
            ) => Element::Residues(x.iter().zip(y).map(|(p, q)| (p + q) % modulus).collect()),
            (GroupKind::SymmetricGroup { .. }, Element::Perm(x), Element::Perm(y)) => {
                // apply x first, then y
                Element::Perm(x.iter().map(|&v| y[v as usize]).collect())
            }
            (GroupKind::DirectProduct { factors }, Element::Tuple(x), Element::Tuple(y)) => {
                Element::Tuple(
                    factors
                        .iter()
                        .zip(x.iter().zip(y))
                        .map(|(f, (p, q))| f.multiply(p, q))
                        .collect(),
                )
            }
            _ => panic!("element representation does not match the model"),
        }
    }

    pub fn invert(&self, a: &Element) -> Element {
        match (&self.kind, a) {
            (GroupKind::FreeAbelian { .. }, Element::Vector(x)) => {
                Element::Vector(x.iter().map(|v| -v).collect())
            }
            (GroupKind::FreeGroup { .. }, Element::Reduced(x)) => {
                Element::Reduced(x.iter().rev().map(|l| l.inverse()).collect())
            }
            (GroupKind::FiniteCyclicPower { modulus, .. }, Element::Residues(x)) => {
                Element::Residues(x.iter().map(|v| (modulus - v) % modulus).collect())
            }
            (GroupKind::SymmetricGroup { .. }, Element::Perm(x)) => {
                let mut inv = vec![0u8; x.len()];
                for (i, &v) in x.iter().enumerate() {
                    inv[v as usize] = i as u8;
                }
                Element::Perm(inv)
            }
            (GroupKind::DirectProduct { factors }, Element::Tuple(x)) => Element::Tuple(
                factors
                    .iter()
                    .zip(x)
                    .map(|(f, p)| f.invert(p))
                    .collect(),
            ),
            _ => panic!("element representation does not match the model"),
        }
    }

    fn letter_element(&self, l: Letter) -> Element {
        let g = self.generator_element(l.gen);
        if l.inv {
            self.invert(&g)
        } else {
            g
        }
    }

    /// Product of the letter images in left-to-right order; the empty word
    /// evaluates to the identity.
    pub fn evaluate_word(&self, w: &Word) -> Result<Element> {
        let mut acc = self.identity();
        for &l in &w.letters {
            if l.gen as usize >= self.gens.len() {
                return Err(Error::UnknownSymbol(format!("#{}", l.gen)));
            }
            acc = self.multiply(&acc, &self.letter_element(l));
        }
        Ok(acc)
    }

    pub fn is_identity_word(&self, w: &Word) -> Result<bool> {
        Ok(self.evaluate_word(w)? == self.identity())
    }

    /// Shortlex-geodesic normal form of `g` over the symmetric generating
    /// set.
    pub fn normal_form(&self, g: &Element) -> Word {
        match (&self.kind, g) {
            (GroupKind::FreeAbelian { .. }, Element::Vector(x)) => {
                let mut letters = Vec::new();
                for (i, &v) in x.iter().enumerate() {
                    let l = if v < 0 {
                        Letter::plain(i as u16).inverse()
                    } else {
                        Letter::plain(i as u16)
                    };
                    for _ in 0..v.unsigned_abs() {
                        letters.push(l);
                    }
                }
                Word::new(letters)
            }
            (GroupKind::FreeGroup { .. }, Element::Reduced(x)) => Word::new(x.clone()),
            (GroupKind::FiniteCyclicPower { modulus, .. }, Element::Residues(x)) => {
                let mut letters = Vec::new();
                for (i, &v) in x.iter().enumerate() {
                    // geodesic direction; ties (v == modulus/2) go positive
                    if v <= modulus / 2 {
                        for _ in 0..v {
                            letters.push(Letter::plain(i as u16));
                        }
                    } else {
                        for _ in 0..(modulus - v) {
                            letters.push(Letter::plain(i as u16).inverse());
                        }
                    }
                }
                Word::new(letters)
            }
            (GroupKind::SymmetricGroup { .. }, Element::Perm(x)) => {
                let table = self.shortlex.as_ref().expect("table built at construction");
                Word::new(table.get(x).expect("element of the finite group").clone())
            }
            (GroupKind::DirectProduct { factors }, Element::Tuple(x)) => {
                let mut letters = Vec::new();
                let mut offset = 0u16;
                for (f, p) in factors.iter().zip(x) {
                    for l in f.normal_form(p).letters {
                        letters.push(Letter {
                            gen: l.gen + offset,
                            inv: l.inv,
                        });
                    }
                    offset += f.gens.len() as u16;
                }
                Word::new(letters)
            }
            _ => panic!("element representation does not match the model"),
        }
    }

    fn build_shortlex_table(&self) -> ShortlexTable {
        let id = match self.identity() {
            Element::Perm(p) => p,
            _ => unreachable!(),
        };
        let letters = self.gens.symmetric_letters();
        let mut table: ShortlexTable = HashMap::new();
        table.insert(id.clone(), Vec::new());
        let mut queue = VecDeque::new();
        queue.push_back(Element::Perm(id));
        while let Some(g) = queue.pop_front() {
            let base = match &g {
                Element::Perm(p) => table[p].clone(),
                _ => unreachable!(),
            };
            for &l in &letters {
                let h = self.multiply(&g, &self.letter_element(l));
                if let Element::Perm(p) = &h {
                    if !table.contains_key(p) {
                        let mut w = base.clone();
                        w.push(l);
                        table.insert(p.clone(), w);
                        queue.push_back(h);
                    }
                }
            }
        }
        table
    }

    /// Word-length ball: all elements of length at most `r`, in
    /// breadth-first shortlex discovery order starting at the identity.
    pub fn ball_elements_with_cap(&self, r: u32, cap: usize) -> Result<Vec<Element>> {
        let letters = self.gens.symmetric_letters();
        let mut index: HashMap<Element, u32> = HashMap::new();
        let mut order = Vec::new();
        let id = self.identity();
        index.insert(id.clone(), 0);
        order.push(id);
        let mut frontier = vec![0usize];
        for _ in 0..r {
            let mut next = Vec::new();
            for &vi in &frontier {
                let g = order[vi].clone();
                for &l in &letters {
                    // left multiplication: the new element is (letter) * g
                    let h = self.multiply(&self.letter_element(l), &g);
                    if !index.contains_key(&h) {
                        if order.len() >= cap {
                            return Err(Error::ResourceCap {
                                what: "cayley ball vertices".into(),
                                cap,
                            });
                        }
                        index.insert(h.clone(), order.len() as u32);
                        next.push(order.len());
                        order.push(h);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(order)
    }

    pub fn ball_elements(&self, r: u32) -> Result<Vec<Element>> {
        self.ball_elements_with_cap(r, DEFAULT_BALL_CAP)
    }

    /// Rooted labeled Cayley ball of radius `r`: vertices are the elements
    /// of length at most `r`, with an edge `g -> s*g` labeled `s` whenever
    /// both endpoints lie in the ball. The root (index 0) is the identity.
    pub fn cayley_ball_with_cap(&self, r: u32, cap: usize) -> Result<RootedBall> {
        let order = self.ball_elements_with_cap(r, cap)?;
        let index: HashMap<&Element, u32> = order
            .iter()
            .enumerate()
            .map(|(i, g)| (g, i as u32))
            .collect();
        let mut edges = Vec::new();
        for (i, g) in order.iter().enumerate() {
            for s in 0..self.gens.len() as u16 {
                let h = self.multiply(&self.generator_element(s), g);
                if let Some(&j) = index.get(&h) {
                    edges.push((i as u32, j, s));
                }
            }
        }
        let graph =
            LabeledGraph::from_directed_edges(order.len(), self.gens.names().to_vec(), edges)?;
        Ok(RootedBall {
            graph,
            root: 0,
            radius: r,
        })
    }

    pub fn cayley_ball(&self, r: u32) -> Result<RootedBall> {
        self.cayley_ball_with_cap(r, DEFAULT_BALL_CAP)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_vanishes_in_abelian_model() {
        let m = GroupModel::free_abelian(2).unwrap();
        let w = Word::parse(m.generating_set(), "a b a^-1 b^-1").unwrap();
        assert!(m.is_identity_word(&w).unwrap());
    }

    #[test]
    fn commutator_survives_in_free_group() {
        let m = GroupModel::free_group(2).unwrap();
        let w = Word::parse(m.generating_set(), "a b a^-1 b^-1").unwrap();
        let g = m.evaluate_word(&w).unwrap();
        assert!(!m.is_identity_word(&w).unwrap());
        match g {
            Element::Reduced(letters) => assert_eq!(letters.len(), 4),
            _ => panic!("wrong representation"),
        }
    }

    #[test]
    fn cyclic_arithmetic() {
        let m = GroupModel::finite_cyclic_power(5, 1).unwrap();
        let w = Word::parse(m.generating_set(), "a a a a a a a").unwrap();
        let g = m.evaluate_word(&w).unwrap();
        assert_eq!(g, Element::Residues(vec![2]));
        let w2 = Word::parse(m.generating_set(), "a a").unwrap();
        assert!(!m.is_identity_word(&w2).unwrap());
        assert!(m
            .is_identity_word(&Word::parse(m.generating_set(), "").unwrap())
            .unwrap());
    }

    #[test]
    fn unknown_symbols_are_rejected() {
        let m = GroupModel::free_abelian(1).unwrap();
        assert!(matches!(
            Word::parse(m.generating_set(), "a q"),
            Err(Error::UnknownSymbol(_))
        ));
        let w = Word::new(vec![Letter::plain(5)]);
        assert!(m.evaluate_word(&w).is_err());
    }

    #[test]
    fn empty_word_is_identity_everywhere() {
        for m in [
            GroupModel::free_group(2).unwrap(),
            GroupModel::free_abelian(1).unwrap(),
            GroupModel::symmetric_group(4).unwrap(),
        ] {
            assert!(m.is_identity_word(&Word::empty()).unwrap());
        }
        let m = GroupModel::free_abelian(1).unwrap();
        let w = Word::parse(m.generating_set(), "a a^-1").unwrap();
        assert!(m.is_identity_word(&w).unwrap());
    }

    #[test]
    fn group_axioms_on_sampled_triples() {
        let models = vec![
            GroupModel::free_abelian(2).unwrap(),
            GroupModel::free_group(2).unwrap(),
            GroupModel::finite_cyclic_power(4, 2).unwrap(),
            GroupModel::symmetric_group(4).unwrap(),
            GroupModel::direct_product(vec![
                GroupModel::finite_cyclic_power(3, 1).unwrap(),
                GroupModel::symmetric_group(3).unwrap(),
            ])
            .unwrap(),
        ];
        for m in models {
            let sample = m.ball_elements(2).unwrap();
            let id = m.identity();
            for a in sample.iter().take(6) {
                assert_eq!(m.multiply(a, &id), *a);
                assert_eq!(m.multiply(&id, a), *a);
                assert_eq!(m.multiply(&m.invert(a), a), id);
                for b in sample.iter().take(6) {
                    for c in sample.iter().take(6) {
                        let ab_c = m.multiply(&m.multiply(a, b), c);
                        let a_bc = m.multiply(a, &m.multiply(b, c));
                        assert_eq!(ab_c, a_bc);
                    }
                }
            }
        }
    }

    #[test]
    fn line_ball_is_a_labeled_path() {
        let m = GroupModel::free_abelian(1).unwrap();
        let ball = m.cayley_ball(2).unwrap();
        assert_eq!(ball.graph.vertex_count(), 5);
        assert_eq!(ball.graph.simple_edges().len(), 4);
        assert_eq!(ball.root, 0);
        assert_eq!(ball.graph.degree(0), 2);
    }

    #[test]
    fn free_group_ball_is_a_star_at_radius_one() {
        let m = GroupModel::free_group(2).unwrap();
        let ball = m.cayley_ball(1).unwrap();
        assert_eq!(ball.graph.vertex_count(), 5);
        assert_eq!(ball.graph.degree(0), 4);
        for v in 1..5 {
            assert_eq!(ball.graph.degree(v), 1);
        }
    }

    #[test]
    fn plane_ball_is_a_cross_at_radius_one() {
        let m = GroupModel::free_abelian(2).unwrap();
        let ball = m.cayley_ball(1).unwrap();
        assert_eq!(ball.graph.vertex_count(), 5);
        assert_eq!(ball.graph.degree(0), 4);
    }

    #[test]
    fn free_group_ball_sizes_match_closed_form() {
        // |B_r| = 1 + 2k ((2k-1)^r - 1) / (2k - 2) for the free group F_k
        for k in 2..=3u32 {
            let m = GroupModel::free_group(k as usize).unwrap();
            for r in 0..=5u32 {
                let expect = 1 + (2 * k) as u64 * (((2 * k - 1) as u64).pow(r) - 1)
                    / (2 * k - 2) as u64;
                let got = m.ball_elements(r).unwrap().len() as u64;
                assert_eq!(got, expect, "k={k} r={r}");
            }
        }
    }

    #[test]
    fn abelian_ball_sizes_match_lattice_count() {
        for d in 1..=3usize {
            let m = GroupModel::free_abelian(d).unwrap();
            for r in 0..=8i64 {
                // brute-force lattice count of |v|_1 <= r
                let mut count = 0u64;
                let mut v = vec![-r; d];
                'outer: loop {
                    let norm: i64 = v.iter().map(|x| x.abs()).sum();
                    if norm <= r {
                        count += 1;
                    }
                    for i in 0..d {
                        if v[i] < r {
                            v[i] += 1;
                            continue 'outer;
                        }
                        v[i] = -r;
                    }
                    break;
                }
                let got = m.ball_elements(r as u32).unwrap().len() as u64;
                assert_eq!(got, count, "d={d} r={r}");
            }
        }
    }

    #[test]
    fn ball_nesting() {
        let m = GroupModel::free_group(2).unwrap();
        for r in 1..=4u32 {
            let outer = m.ball_elements(r).unwrap();
            let inner = m.ball_elements(r - 1).unwrap();
            // discovery order of the smaller ball is a prefix of the larger
            assert_eq!(&outer[..inner.len()], &inner[..]);
        }
    }

    #[test]
    fn ball_cap_is_reported() {
        let m = GroupModel::free_group(3).unwrap();
        match m.ball_elements_with_cap(10, 100) {
            Err(Error::ResourceCap { cap, .. }) => assert_eq!(cap, 100),
            other => panic!("expected resource cap, got {other:?}"),
        }
    }

    #[test]
    fn shortlex_normal_forms_are_geodesic_in_s4() {
        let m = GroupModel::symmetric_group(4).unwrap();
        // every element's normal form evaluates back to the element
        for g in m.ball_elements(12).unwrap() {
            let w = m.normal_form(&g);
            assert_eq!(m.evaluate_word(&w).unwrap(), g);
        }
        // the transposition and the cycle are length-one
        let t = m.generator_element(0);
        assert_eq!(m.normal_form(&t).len(), 1);
    }

    #[test]
    fn cyclic_normal_form_takes_the_short_way_round() {
        let m = GroupModel::finite_cyclic_power(10, 1).unwrap();
        let g = Element::Residues(vec![7]);
        let w = m.normal_form(&g);
        assert_eq!(w.len(), 3);
        assert!(w.letters.iter().all(|l| l.inv));
        assert_eq!(m.evaluate_word(&w).unwrap(), g);
    }
}
