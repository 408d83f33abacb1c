//! Builders for the unit-equilateral graph families: alpha/beta words on the
//! line and on rings, gamma and delta chains, square stripes and prism
//! tubes.
//!
//! Vertex numbering is deterministic. Channel 0 is always the entrance lead
//! and channel 1 the exit lead.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::graph::{Edge, GraphError, MetricGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("word is empty")]
    EmptyWord,

    #[error("word of length {0} is too short for a ring (need at least 3)")]
    WordTooShort(usize),

    #[error("family size must be at least 1")]
    ZeroCount,

    #[error("invalid letter {0:?} (expected 'a' or 'b')")]
    InvalidLetter(char),

    #[error("unknown family {0:?}")]
    UnknownFamily(String),

    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    /// Chain vertex with one dead end attached (degree 3 on a chain).
    Alpha,
    /// Chain vertex with two dead ends attached (degree 4 on a chain).
    Beta,
}

impl Letter {
    pub fn pendants(self) -> usize {
        match self {
            Letter::Alpha => 1,
            Letter::Beta => 2,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::Alpha => 'a',
            Letter::Beta => 'b',
        }
    }
}

impl TryFrom<char> for Letter {
    type Error = FamilyError;
    fn try_from(c: char) -> Result<Self, FamilyError> {
        match c {
            'a' | 'A' | 'α' => Ok(Letter::Alpha),
            'b' | 'B' | 'β' => Ok(Letter::Beta),
            other => Err(FamilyError::InvalidLetter(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self, FamilyError> {
        if letters.is_empty() {
            return Err(FamilyError::EmptyWord);
        }
        Ok(Self(letters))
    }

    pub fn uniform(letter: Letter, n: usize) -> Result<Self, FamilyError> {
        Self::new(vec![letter; n])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromStr for Word {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, FamilyError> {
        Self::new(s.chars().map(Letter::try_from).collect::<Result<_, _>>()?)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.as_char()))
    }
}

/// Family names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Line,
    Circle,
    Circle2,
    Gamma,
    Delta,
    Squares,
    Prisms,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::Line,
        FamilyKind::Circle,
        FamilyKind::Circle2,
        FamilyKind::Gamma,
        FamilyKind::Delta,
        FamilyKind::Squares,
        FamilyKind::Prisms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Line => "line",
            FamilyKind::Circle => "circle",
            FamilyKind::Circle2 => "circle2",
            FamilyKind::Gamma => "gamma",
            FamilyKind::Delta => "delta",
            FamilyKind::Squares => "squares",
            FamilyKind::Prisms => "prisms",
        }
    }

    /// Whether the family is parameterized by a word rather than a count.
    pub fn takes_word(self) -> bool {
        matches!(self, FamilyKind::Line | FamilyKind::Circle | FamilyKind::Circle2)
    }

    pub fn with_word(self, word: Word) -> Option<FamilySpec> {
        match self {
            FamilyKind::Line => Some(FamilySpec::Line(word)),
            FamilyKind::Circle => Some(FamilySpec::Circle(word)),
            FamilyKind::Circle2 => Some(FamilySpec::Circle2(word)),
            _ => None,
        }
    }

    pub fn with_count(self, n: usize) -> Option<FamilySpec> {
        match self {
            FamilyKind::Gamma => Some(FamilySpec::GammaChain(n)),
            FamilyKind::Delta => Some(FamilySpec::DeltaChain(n)),
            FamilyKind::Squares => Some(FamilySpec::SquareStripe(n)),
            FamilyKind::Prisms => Some(FamilySpec::PrismTube(n)),
            _ => None,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, FamilyError> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Line(Word),
    Circle(Word),
    Circle2(Word),
    GammaChain(usize),
    DeltaChain(usize),
    SquareStripe(usize),
    PrismTube(usize),
}

impl FamilySpec {
    pub fn kind(&self) -> FamilyKind {
        match self {
            FamilySpec::Line(_) => FamilyKind::Line,
            FamilySpec::Circle(_) => FamilyKind::Circle,
            FamilySpec::Circle2(_) => FamilyKind::Circle2,
            FamilySpec::GammaChain(_) => FamilyKind::Gamma,
            FamilySpec::DeltaChain(_) => FamilyKind::Delta,
            FamilySpec::SquareStripe(_) => FamilyKind::Squares,
            FamilySpec::PrismTube(_) => FamilyKind::Prisms,
        }
    }

    /// Word length or unit count.
    pub fn size(&self) -> usize {
        match self {
            FamilySpec::Line(w) | FamilySpec::Circle(w) | FamilySpec::Circle2(w) => w.len(),
            FamilySpec::GammaChain(n)
            | FamilySpec::DeltaChain(n)
            | FamilySpec::SquareStripe(n)
            | FamilySpec::PrismTube(n) => *n,
        }
    }

    pub fn build(&self) -> Result<MetricGraph, FamilyError> {
        match self {
            FamilySpec::Line(w) => build_line(w),
            FamilySpec::Circle(w) => build_circle(w),
            FamilySpec::Circle2(w) => build_circle2(w),
            FamilySpec::GammaChain(n) => build_gamma_chain(*n),
            FamilySpec::DeltaChain(n) => build_delta_chain(*n),
            FamilySpec::SquareStripe(n) => build_square_stripe(*n),
            FamilySpec::PrismTube(n) => build_prism_tube(*n),
        }
    }
}

/// Appends the dead ends of each word letter to the word vertices
/// `0..n`, returning the pendant vertex indices per word position.
fn attach_pendants(word: &Word, edges: &mut Vec<Edge>) -> (usize, Vec<Vec<usize>>) {
    let mut next = word.len();
    let pendants = word
        .letters()
        .iter()
        .enumerate()
        .map(|(m, letter)| {
            (0..letter.pendants())
                .map(|_| {
                    edges.push(Edge::unit(m, next));
                    next += 1;
                    next - 1
                })
                .collect()
        })
        .collect();
    (next, pendants)
}

/// Chain `c_1 .. c_n` with leads on the two ends (both on `c_1` when
/// `n = 1`).
pub fn build_line(word: &Word) -> Result<MetricGraph, FamilyError> {
    let n = word.len();
    if n == 0 {
        return Err(FamilyError::EmptyWord);
    }
    let mut edges: Vec<Edge> = (1..n).map(|m| Edge::unit(m - 1, m)).collect();
    let (num_vertices, _) = attach_pendants(word, &mut edges);
    Ok(MetricGraph::neumann(num_vertices, edges, &[0, n - 1])?)
}

/// Vertex count, edges and the pendant vertices hung on each ring vertex.
type Ring = (usize, Vec<Edge>, Vec<Vec<usize>>);

fn ring(word: &Word) -> Result<Ring, FamilyError> {
    let n = word.len();
    if n < 3 {
        return Err(FamilyError::WordTooShort(n));
    }
    let mut edges: Vec<Edge> = (0..n).map(|m| Edge::unit(m, (m + 1) % n)).collect();
    let (num_vertices, pendants) = attach_pendants(word, &mut edges);
    Ok((num_vertices, edges, pendants))
}

/// Ring with leads directly on `c_1` and its neighbour `c_2`. Letters are
/// placed clockwise from `c_1`.
pub fn build_circle(word: &Word) -> Result<MetricGraph, FamilyError> {
    let (num_vertices, edges, _) = ring(word)?;
    Ok(MetricGraph::neumann(num_vertices, edges, &[0, 1])?)
}

/// Ring with leads on the first dead end of `c_1` and of `c_2`.
pub fn build_circle2(word: &Word) -> Result<MetricGraph, FamilyError> {
    let (num_vertices, edges, pendants) = ring(word)?;
    Ok(MetricGraph::neumann(num_vertices, edges, &[pendants[0][0], pendants[1][0]])?)
}

/// [`build_circle2`] with the two lead-carrying (transparent) vertices and
/// their edges removed, the leads moved onto `c_1` and `c_2`.
pub fn build_circle2_reduced(word: &Word) -> Result<MetricGraph, FamilyError> {
    let (num_vertices, edges, pendants) = ring(word)?;
    let dropped = [pendants[0][0], pendants[1][0]];
    let mut index = Vec::with_capacity(num_vertices);
    let mut kept = 0;
    for v in 0..num_vertices {
        if dropped.contains(&v) {
            index.push(usize::MAX);
        } else {
            index.push(kept);
            kept += 1;
        }
    }
    let edges = edges
        .into_iter()
        .filter(|e| !dropped.contains(&e.u) && !dropped.contains(&e.v))
        .map(|e| Edge::new(index[e.u], index[e.v], e.length))
        .collect();
    Ok(MetricGraph::neumann(kept, edges, &[0, 1])?)
}

/// Generation `m` of the substitution `a -> ab, b -> a` started from `a`.
pub fn fibonacci_word(generation: usize) -> Word {
    let mut letters = vec![Letter::Alpha];
    for _ in 1..generation.max(1) {
        letters = letters
            .iter()
            .flat_map(|l| match l {
                Letter::Alpha => vec![Letter::Alpha, Letter::Beta],
                Letter::Beta => vec![Letter::Alpha],
            })
            .collect();
    }
    Word(letters)
}

/// Each letter independently `a` or `b` with probability 1/2.
pub fn random_word<R: Rng + ?Sized>(length: usize, rng: &mut R) -> Result<Word, FamilyError> {
    Word::new((0..length).map(|_| if rng.gen::<bool>() { Letter::Beta } else { Letter::Alpha }).collect())
}

/// Chain of `n` gamma units (two triangles glued along an edge). Unit `m`
/// has vertices `a, b, c, d = 4m .. 4m + 3`, shared edge `a b`, and is tied
/// to the next unit by `d_m c_{m+1}`. Leads on `c_1` and `d_n`.
pub fn build_gamma_chain(n: usize) -> Result<MetricGraph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::ZeroCount);
    }
    let mut edges = Vec::with_capacity(6 * n);
    for m in 0..n {
        let [a, b, c, d] = [0, 1, 2, 3].map(|i| 4 * m + i);
        edges.extend([(a, b), (a, c), (b, c), (a, d), (b, d)].map(|(u, v)| Edge::unit(u, v)));
        if m > 0 {
            edges.push(Edge::unit(4 * m - 1, c));
        }
    }
    Ok(MetricGraph::neumann(4 * n, edges, &[2, 4 * n - 1])?)
}

/// Chain of `n` delta units (two tetrahedra glued along a face). Unit `m`
/// has shared face `a b c` and apexes `d, e`; consecutive units are tied by
/// `e_m d_{m+1}`. Leads on `d_1` and `e_n`.
pub fn build_delta_chain(n: usize) -> Result<MetricGraph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::ZeroCount);
    }
    let mut edges = Vec::with_capacity(10 * n);
    for m in 0..n {
        let [a, b, c, d, e] = [0, 1, 2, 3, 4].map(|i| 5 * m + i);
        edges.extend(
            [(a, b), (b, c), (a, c), (d, a), (d, b), (d, c), (e, a), (e, b), (e, c)].map(|(u, v)| Edge::unit(u, v)),
        );
        if m > 0 {
            edges.push(Edge::unit(5 * m - 1, d));
        }
    }
    Ok(MetricGraph::neumann(5 * n, edges, &[3, 5 * n - 1])?)
}

/// Ladder of `n` squares capped by a triangle at each end. Top rail
/// `0..=n`, bottom rail `n+1 ..= 2n+1`, apexes `2n+2` (entrance) and
/// `2n+3` (exit).
pub fn build_square_stripe(n: usize) -> Result<MetricGraph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::ZeroCount);
    }
    let top = |i: usize| i;
    let bottom = |i: usize| n + 1 + i;
    let (left, right) = (2 * n + 2, 2 * n + 3);
    let mut edges = Vec::with_capacity(3 * n + 5);
    for i in 0..n {
        edges.push(Edge::unit(top(i), top(i + 1)));
        edges.push(Edge::unit(bottom(i), bottom(i + 1)));
    }
    edges.extend((0..=n).map(|i| Edge::unit(top(i), bottom(i))));
    edges.extend([
        Edge::unit(left, top(0)),
        Edge::unit(left, bottom(0)),
        Edge::unit(right, top(n)),
        Edge::unit(right, bottom(n)),
    ]);
    Ok(MetricGraph::neumann(2 * n + 4, edges, &[left, right])?)
}

/// Tube of `n` triangular prisms capped by a tetrahedron at each end.
/// Layer `j` holds vertices `3j .. 3j + 2`; apexes are `3n + 3` (entrance)
/// and `3n + 4` (exit).
pub fn build_prism_tube(n: usize) -> Result<MetricGraph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::ZeroCount);
    }
    let at = |layer: usize, j: usize| 3 * layer + j;
    let (left, right) = (3 * n + 3, 3 * n + 4);
    let mut edges = Vec::with_capacity(6 * n + 9);
    for layer in 0..=n {
        edges.extend([(0, 1), (1, 2), (0, 2)].map(|(i, j)| Edge::unit(at(layer, i), at(layer, j))));
    }
    for layer in 0..n {
        edges.extend((0..3).map(|j| Edge::unit(at(layer, j), at(layer + 1, j))));
    }
    edges.extend((0..3).map(|j| Edge::unit(left, at(0, j))));
    edges.extend((0..3).map(|j| Edge::unit(right, at(n, j))));
    Ok(MetricGraph::neumann(3 * n + 5, edges, &[left, right])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn line_counts() {
        let g = build_line(&word("aaaa")).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.num_leads()), (8, 7, 2));
        assert!((0..4).all(|v| g.degree(v).unwrap() == 3));

        let g = build_line(&word("bbb")).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.num_leads()), (9, 8, 2));
        assert!((0..3).all(|v| g.degree(v).unwrap() == 4));
    }

    #[test]
    fn single_letter_line_is_alpha() {
        let g = build_line(&word("a")).unwrap();
        let alpha = MetricGraph::neumann(2, vec![Edge::unit(0, 1)], &[0, 0]).unwrap();
        assert_eq!(g, alpha);
    }

    #[test]
    fn empty_word() {
        assert_eq!("".parse::<Word>(), Err(FamilyError::EmptyWord));
        assert_eq!("abx".parse::<Word>(), Err(FamilyError::InvalidLetter('x')));
    }

    #[test]
    fn circle_counts() {
        let g = build_circle(&word("aaaa")).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.num_leads()), (8, 8, 2));
        assert_eq!(&g.degrees()[..4], &[4, 4, 3, 3]);

        let g = build_circle(&word("bbb")).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (9, 9));
        assert_eq!(&g.degrees()[..3], &[5, 5, 4]);

        assert_eq!(build_circle(&word("aa")), Err(FamilyError::WordTooShort(2)));
        assert_eq!(build_circle2(&word("aa")), Err(FamilyError::WordTooShort(2)));
    }

    #[test]
    fn circle2_leads_on_pendants() {
        let g = build_circle2(&word("aaaa")).unwrap();
        assert!((0..4).all(|v| g.degree(v).unwrap() == 3));
        let lead_vertices: Vec<usize> = g.leads().iter().map(|l| l.vertex).collect();
        assert_eq!(lead_vertices, vec![4, 5]);
        assert!(lead_vertices.iter().all(|&v| g.degree(v).unwrap() == 2));

        let g = build_circle2(&word("bbb")).unwrap();
        assert!((0..3).all(|v| g.degree(v).unwrap() == 4));
        // first-created pendants of c_1 and c_2
        assert_eq!(g.leads().iter().map(|l| l.vertex).collect::<Vec<_>>(), vec![3, 5]);
        assert_eq!(g.degree(4).unwrap(), 1);

        let r = build_circle2_reduced(&word("bbb")).unwrap();
        assert_eq!((r.num_vertices(), r.num_edges()), (7, 7));
        assert!((0..3).all(|v| r.degree(v).unwrap() == 4));
    }

    #[test]
    fn fibonacci_words() {
        assert_eq!(fibonacci_word(1).to_string(), "a");
        assert_eq!(fibonacci_word(2).to_string(), "ab");
        assert_eq!(fibonacci_word(3).to_string(), "aba");
        assert_eq!(fibonacci_word(4).to_string(), "abaab");
        assert_eq!(fibonacci_word(7).len(), 21);
        let lens: Vec<usize> = (1..12).map(|m| fibonacci_word(m).len()).collect();
        assert!(lens.windows(3).all(|w| w[0] + w[1] == w[2]));
    }

    #[test]
    fn random_words() {
        let a = random_word(13, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = random_word(13, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 13);
        let w = random_word(10_000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let frac = w.letters().iter().filter(|&&l| l == Letter::Beta).count() as f64 / 1e4;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");
        assert_eq!(random_word(0, &mut ChaCha8Rng::seed_from_u64(1)), Err(FamilyError::EmptyWord));
    }

    #[test]
    fn chain_counts_and_degrees() {
        let g = build_gamma_chain(1).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.num_leads()), (4, 5, 2));
        let g = build_gamma_chain(3).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (12, 17));
        let g = build_delta_chain(1).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.num_leads()), (5, 9, 2));
        let g = build_delta_chain(3).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (15, 29));
        for n in 1..8 {
            assert!(build_gamma_chain(n).unwrap().degrees().iter().all(|&d| d == 3));
            assert!(build_delta_chain(n).unwrap().degrees().iter().all(|&d| d == 4));
            assert!(build_square_stripe(n).unwrap().degrees().iter().all(|&d| d == 3));
            assert!(build_prism_tube(n).unwrap().degrees().iter().all(|&d| d == 4));
        }
        assert_eq!(build_gamma_chain(0), Err(FamilyError::ZeroCount));
    }

    #[test]
    fn stripe_and_tube_counts() {
        let g = build_square_stripe(3).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (10, 14));
        let g = build_square_stripe(1).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (6, 8));
        let g = build_prism_tube(1).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges(), g.num_leads()), (8, 15, 2));
        let g = build_prism_tube(3).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (14, 27));
    }

    #[test]
    fn family_names_round_trip() {
        for k in FamilyKind::ALL {
            assert_eq!(k.name().parse::<FamilyKind>().unwrap(), k);
        }
        assert!("hexagons".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn builders_are_unit_equilateral() {
        let specs = [
            FamilySpec::Line(word("abba")),
            FamilySpec::Circle(word("abb")),
            FamilySpec::Circle2(word("baab")),
            FamilySpec::GammaChain(2),
            FamilySpec::DeltaChain(2),
            FamilySpec::SquareStripe(2),
            FamilySpec::PrismTube(2),
        ];
        for s in specs {
            let g = s.build().unwrap();
            assert_eq!(g.common_length(), Some(1.0), "{s:?}");
            assert_eq!(g.num_leads(), 2);
        }
    }
}
