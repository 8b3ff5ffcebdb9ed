//! Word-ball orbit enumeration.
//!
//! Breadth-first search over words in the generators and their inverses,
//! deduplicated by matrix proximity. Each discovered element stores only its
//! parent and the last letter, so words are rebuilt once at the end. Because
//! parents are expanded in discovery order and letters in a fixed order, the
//! first word to reach an element is its shortlex-least word among those the
//! search sees.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::GroupError;
use crate::geometry::{angular_dist, visual_angle, DiskIsometry, DiskPoint, BoundaryPoint};
use crate::group::{MobiusMap, WordFilter, MATRIX_TOLERANCE};

/// Distances within this of an integer `n` are counted in annulus `n`.
pub const ANNULUS_TOLERANCE: f64 = 1e-9;

/// Grid used to bucket matrix entries for deduplication; must exceed
/// [`MATRIX_TOLERANCE`]. Cells are centered on multiples of the grid so that
/// integer entries sit far from cell walls.
const DEDUP_CELL: f64 = 1e-7;

const NO_PARENT: u32 = u32::MAX;

/// A word: letter `2i` is generator `i`, letter `2i + 1` its inverse.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of the letters, left to right.
    pub fn evaluate(&self, generators: &[MobiusMap]) -> MobiusMap {
        let mut acc = MobiusMap::IDENTITY;
        for (k, &l) in self.0.iter().enumerate() {
            acc = acc.compose(&letter_map(generators, l));
            if k % 8 == 7 {
                acc = acc.renormalized();
            }
        }
        acc
    }

    /// Exponent sum of generator `g`.
    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.0
            .iter()
            .map(|&l| match (l as usize / 2 == g, l % 2) {
                (true, 0) => 1,
                (true, _) => -1,
                _ => 0,
            })
            .sum()
    }
}

/// Lowercase letters for generators, uppercase for inverses; `e` alone is the empty word.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for &l in &self.0 {
            let base = if l % 2 == 0 { b'a' } else { b'A' };
            write!(f, "{}", (base + l / 2) as char)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

fn letter_map(generators: &[MobiusMap], letter: u8) -> MobiusMap {
    let g = generators[letter as usize / 2];
    if letter.is_multiple_of(2) {
        g
    } else {
        g.inverse()
    }
}

/// One element of an [`OrbitBall`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitElement {
    pub word: Word,
    pub map: MobiusMap,
    /// `α(q)`.
    pub point: DiskPoint,
    /// `d(p, α q)`.
    pub distance: f64,
}

/// Knobs of [`enumerate_ball_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnumerationOptions {
    /// A word is expanded while `d(p, αq) ≤ radius + slack`. `None` uses twice
    /// the largest generator displacement of `q`.
    pub slack: Option<f64>,
    pub filter: Option<WordFilter>,
}

/// The deduplicated set `{α : d(p, αq) ≤ R}`, sorted by distance and then shortlex word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitBall {
    pub base_p: DiskPoint,
    pub base_q: DiskPoint,
    pub radius: f64,
    pub generators: Vec<MobiusMap>,
    pub elements: Vec<OrbitElement>,
    /// False when the element budget ran out.
    pub complete: bool,
    /// Expansion slack used by the search.
    pub slack: f64,
    /// Number of distinct elements the search visited, in or out of the ball.
    pub explored: usize,
    /// Distinct elements whose entries came within the dedup grid of each
    /// other; a nonzero count hints at a non-discrete group.
    pub near_collisions: usize,
    pub filter: Option<WordFilter>,
}

struct Node {
    map: MobiusMap,
    distance: f64,
    parent: u32,
    letter: u8,
}

type CellKey = [i64; 4];

fn cell_keys(m: &MobiusMap, out: &mut Vec<CellKey>) {
    out.clear();
    out.push([0; 4]);
    let e = m.entries();
    for (k, x) in e.iter().enumerate() {
        let scaled = x / DEDUP_CELL + 0.5;
        let cell = scaled.floor();
        let frac = scaled - cell;
        let margin = MATRIX_TOLERANCE / DEDUP_CELL;
        let neighbor = if frac < margin {
            Some(cell as i64 - 1)
        } else if frac > 1.0 - margin {
            Some(cell as i64 + 1)
        } else {
            None
        };
        let n = out.len();
        for row in out.iter_mut() {
            row[k] = cell as i64;
        }
        if let Some(nb) = neighbor {
            for i in 0..n {
                let mut key = out[i];
                key[k] = nb;
                out.push(key);
            }
        }
    }
}

fn primary_key(m: &MobiusMap) -> CellKey {
    m.entries().map(|x| (x / DEDUP_CELL + 0.5).floor() as i64)
}

/// Distance evaluator `α ↦ d(p, αq)` computed from matrix entries.
#[derive(Clone, Copy)]
pub(crate) struct OrbitMetric {
    pull_p: DiskIsometry,
    push_q: DiskIsometry,
}

impl OrbitMetric {
    pub(crate) fn new(p: DiskPoint, q: DiskPoint) -> Self {
        OrbitMetric {
            pull_p: p.translation().inverse(),
            push_q: q.translation(),
        }
    }

    #[inline]
    pub(crate) fn distance(&self, m: &MobiusMap) -> f64 {
        (self.pull_p * m.to_disk() * self.push_q).displacement_of_origin()
    }
}

/// Enumerates the orbit ball with default options.
pub fn enumerate_ball(
    generators: &[MobiusMap],
    p: DiskPoint,
    q: DiskPoint,
    radius: f64,
    max_elements: usize,
) -> Result<OrbitBall, GroupError> {
    enumerate_ball_with(generators, p, q, radius, max_elements, EnumerationOptions::default())
}

/// Largest `d(q, g q)` over the generators.
pub fn max_generator_displacement(generators: &[MobiusMap], q: DiskPoint) -> f64 {
    generators
        .iter()
        .map(|g| g.displacement(q))
        .fold(0.0, f64::max)
}

pub fn enumerate_ball_with(
    generators: &[MobiusMap],
    p: DiskPoint,
    q: DiskPoint,
    radius: f64,
    max_elements: usize,
    options: EnumerationOptions,
) -> Result<OrbitBall, GroupError> {
    if generators.is_empty() {
        return Err(GroupError::NoGenerators);
    }
    if generators.len() > 26 {
        return Err(GroupError::TooManyGenerators(generators.len()));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(GroupError::InvalidArgument(format!(
            "radius {radius} must be positive and finite"
        )));
    }
    if max_elements == 0 {
        return Err(GroupError::InvalidArgument("element budget must be positive".into()));
    }
    let slack = match options.slack {
        Some(s) if s >= 0.0 => s,
        Some(s) => {
            return Err(GroupError::InvalidArgument(format!("slack {s} must be nonnegative")))
        }
        None => 2.0 * max_generator_displacement(generators, q),
    };
    let limit = radius + slack;
    let metric = OrbitMetric::new(p, q);
    let letters: Vec<MobiusMap> = (0..2 * generators.len() as u8)
        .map(|l| letter_map(generators, l))
        .collect();

    let mut nodes = vec![Node {
        map: MobiusMap::IDENTITY,
        distance: metric.distance(&MobiusMap::IDENTITY),
        parent: NO_PARENT,
        letter: 0,
    }];
    let mut index: FxHashMap<CellKey, u32> = FxHashMap::default();
    index.insert(primary_key(&MobiusMap::IDENTITY), 0);
    let mut kept = usize::from(nodes[0].distance <= radius);
    let mut near_collisions = 0;
    let mut complete = true;
    let mut keys = Vec::with_capacity(16);

    let mut head = 0;
    'search: while head < nodes.len() {
        let (map, distance, last) = {
            let n = &nodes[head];
            (n.map, n.distance, n.letter)
        };
        let is_root = head == 0;
        head += 1;
        if distance > limit {
            continue;
        }
        for (l, g) in letters.iter().enumerate() {
            let l = l as u8;
            if !is_root && l == last ^ 1 {
                continue;
            }
            let child = map.compose(g).renormalized();
            let d = metric.distance(&child);
            if d > limit {
                // outside the expansion shell, and never in the ball
                continue;
            }
            cell_keys(&child, &mut keys);
            let mut seen = false;
            for key in &keys {
                if let Some(&j) = index.get(key) {
                    if nodes[j as usize].map.approx_eq(&child, MATRIX_TOLERANCE) {
                        seen = true;
                        break;
                    }
                    near_collisions += 1;
                }
            }
            if seen {
                continue;
            }
            if nodes.len() >= u32::MAX as usize - 1 {
                complete = false;
                break 'search;
            }
            index.insert(primary_key(&child), nodes.len() as u32);
            nodes.push(Node {
                map: child,
                distance: d,
                parent: (head - 1) as u32,
                letter: l,
            });
            if d <= radius {
                kept += 1;
                if kept >= max_elements {
                    complete = false;
                    break 'search;
                }
            }
        }
    }
    drop(index);

    let explored = nodes.len();
    let words = kept_words(&nodes, radius);
    let mut order: Vec<(f64, u32)> = nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.distance <= radius)
        .map(|(i, n)| (n.distance, i as u32))
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let elements: Vec<OrbitElement> = order
        .iter()
        .map(|&(_, i)| {
            let n = &nodes[i as usize];
            OrbitElement {
                word: Word(words.get(i).to_vec()),
                map: n.map,
                point: n.map.to_disk().apply(q),
                distance: n.distance,
            }
        })
        .filter(|e| passes(options.filter, &e.word))
        .collect();

    let ball = OrbitBall {
        base_p: p,
        base_q: q,
        radius,
        generators: generators.to_vec(),
        elements,
        complete,
        slack,
        explored,
        near_collisions,
        filter: options.filter,
    };
    if complete {
        log::debug!(
            "orbit ball R={radius}: {} elements, {explored} explored",
            ball.elements.len()
        );
        Ok(ball)
    } else {
        Err(GroupError::BudgetExceeded {
            budget: max_elements,
            radius,
            partial: Box::new(ball),
        })
    }
}

/// Words of the nodes inside the ball, packed into one buffer.
///
/// Nodes are visited in discovery order, so a kept parent's word is always
/// ready; only parents outside the ball need a walk up the tree.
struct WordTable {
    letters: Vec<u8>,
    /// `(start, len)` per node; `len == u32::MAX` for nodes outside the ball.
    spans: Vec<(u64, u32)>,
}

impl WordTable {
    fn get(&self, node: u32) -> &[u8] {
        let (start, len) = self.spans[node as usize];
        &self.letters[start as usize..start as usize + len as usize]
    }
}

fn kept_words(nodes: &[Node], radius: f64) -> WordTable {
    let mut table = WordTable {
        letters: Vec::new(),
        spans: vec![(0, u32::MAX); nodes.len()],
    };
    let mut detour = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        if n.distance > radius {
            continue;
        }
        let start = table.letters.len() as u64;
        if n.parent != NO_PARENT {
            detour.clear();
            detour.push(n.letter);
            let mut cur = n.parent;
            while cur != NO_PARENT && table.spans[cur as usize].1 == u32::MAX {
                detour.push(nodes[cur as usize].letter);
                cur = nodes[cur as usize].parent;
            }
            if cur != NO_PARENT {
                let (s, l) = table.spans[cur as usize];
                table
                    .letters
                    .extend_from_within(s as usize..s as usize + l as usize);
            }
            table.letters.extend(detour.iter().rev());
        }
        let len = (table.letters.len() as u64 - start) as u32;
        table.spans[i] = (start, len);
    }
    table
}

fn passes(filter: Option<WordFilter>, word: &Word) -> bool {
    match filter {
        None => true,
        Some(WordFilter::ExponentSumZero { generator }) => word.exponent_sum(generator) == 0,
    }
}

impl OrbitBall {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Distances in ball order.
    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.elements.iter().map(|e| e.distance)
    }

    /// The sub-ball of radius `r ≤ radius`.
    ///
    /// Elements keep their words, so this matches a fresh enumeration at `r`
    /// whenever that enumeration finds the same words.
    pub fn truncated(&self, r: f64) -> OrbitBall {
        let r = r.min(self.radius);
        let end = self.elements.partition_point(|e| e.distance <= r);
        OrbitBall {
            base_p: self.base_p,
            base_q: self.base_q,
            radius: r,
            generators: self.generators.clone(),
            elements: self.elements[..end].to_vec(),
            complete: self.complete,
            slack: self.slack,
            explored: self.explored,
            near_collisions: self.near_collisions,
            filter: self.filter,
        }
    }

    /// Index of an element within `tol` of `m`, if present.
    pub fn find(&self, m: &MobiusMap, tol: f64) -> Option<usize> {
        self.elements.iter().position(|e| e.map.approx_eq(m, tol))
    }

    /// Largest displacement `d(q, gq)` over the generators.
    pub fn max_generator_displacement(&self) -> f64 {
        max_generator_displacement(&self.generators, self.base_q)
    }
}

/// `a_n = #{α : n − 1 < d(p, αq) ≤ n}`, with `a_0` counting distance zero.
pub fn annuli_counts(ball: &OrbitBall) -> Vec<u64> {
    if !ball.complete {
        log::warn!("annuli of an incomplete orbit ball undercount the outer shells");
    }
    let n_max = (ball.radius - ANNULUS_TOLERANCE).ceil().max(0.0) as usize;
    let mut counts = vec![0u64; n_max + 1];
    for d in ball.distances() {
        let n = annulus_index(d).min(n_max);
        counts[n] += 1;
    }
    counts
}

/// Annulus containing distance `d`.
#[inline]
pub fn annulus_index(d: f64) -> usize {
    (d - ANNULUS_TOLERANCE).ceil().max(0.0) as usize
}

/// Best witness of `Γ`-duality of `(ξ, η)` found in a ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualWitness {
    pub index: usize,
    pub word: Word,
    /// `max(∠_p(α⁻¹p, ξ), ∠_p(αp, η))`.
    pub residual: f64,
}

/// Searches for `α` with `α⁻¹p` near `ξ` and `αp` near `η` as seen from `p`.
pub fn dual_pair_witness(
    ball: &OrbitBall,
    xi: BoundaryPoint,
    eta: BoundaryPoint,
    eps: f64,
) -> Option<DualWitness> {
    let p = ball.base_p;
    let mut best: Option<(usize, f64)> = None;
    for (k, e) in ball.elements.iter().enumerate() {
        let g = e.map.to_disk();
        let fwd = g.apply_complex(p.as_complex());
        let bwd = g.inverse().apply_complex(p.as_complex());
        if (fwd - p.as_complex()).norm() == 0.0 || (bwd - p.as_complex()).norm() == 0.0 {
            continue;
        }
        let r_fwd = angular_dist(visual_angle(p, fwd), visual_angle(p, eta.to_complex()));
        let r_bwd = angular_dist(visual_angle(p, bwd), visual_angle(p, xi.to_complex()));
        let residual = r_fwd.max(r_bwd);
        if residual < eps && best.is_none_or(|(_, r)| residual < r) {
            best = Some((k, residual));
        }
    }
    best.map(|(index, residual)| DualWitness {
        index,
        word: ball.elements[index].word.clone(),
        residual,
    })
}
