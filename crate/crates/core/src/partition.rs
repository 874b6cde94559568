//! Two-row set partitions and the diagram calculus on them.
//!
//! Points are numbered 1-based: `1..=k` across the upper row (left to
//! right), then `k+1..=k+l` across the lower row (left to right). A
//! partition is kept in canonical form: elements ascending within each
//! block, blocks ordered by their minimal element. Crossing tests and
//! block traversal use the rectangle boundary order: upper row left to
//! right, then lower row right to left.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ParseError, PartitionError};

/// Two-coloring of a single point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::White => 'w',
            Color::Black => 'b',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c {
            'w' => Some(Color::White),
            'b' => Some(Color::Black),
            _ => None,
        }
    }
}

/// Color words for the two rows.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorWords {
    pub upper: Vec<Color>,
    pub lower: Vec<Color>,
}

impl ColorWords {
    /// The word `wbwb...` of the given length, as carried by tensor
    /// powers of a self-conjugate pair of one-leg objects.
    pub fn alternating(len: usize) -> Vec<Color> {
        (0..len)
            .map(|i| if i % 2 == 0 { Color::White } else { Color::Black })
            .collect()
    }

    fn word_string(word: &[Color]) -> String {
        word.iter().map(|c| c.letter()).collect()
    }
}

impl fmt::Display for ColorWords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}|{}",
            Self::word_string(&self.upper),
            Self::word_string(&self.lower)
        )
    }
}

/// Which outer point a rotation moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Whether a rotation moves a point from the upper row down or from the
/// lower row up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

/// A set partition of `k` upper and `l` lower points, optionally
/// two-colored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    upper_count: usize,
    lower_count: usize,
    blocks: Vec<Vec<usize>>,
    colors: Option<ColorWords>,
}

impl SetPartition {
    /// Builds the canonical form from raw blocks, validating that they
    /// partition `{1..=k+l}`.
    pub fn new(
        upper_count: usize,
        lower_count: usize,
        raw_blocks: Vec<Vec<usize>>,
    ) -> Result<SetPartition, PartitionError> {
        let total = upper_count + lower_count;
        let mut seen = vec![false; total + 1];
        let mut blocks = Vec::with_capacity(raw_blocks.len());
        for raw in raw_blocks {
            if raw.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            let mut block: Vec<usize> = raw;
            block.sort_unstable();
            for &p in &block {
                if p == 0 || p > total {
                    return Err(PartitionError::OutOfRange { point: p, max: total });
                }
                if seen[p] {
                    return Err(PartitionError::DuplicatePoint(p));
                }
                seen[p] = true;
            }
            blocks.push(block);
        }
        for p in 1..=total {
            if !seen[p] {
                return Err(PartitionError::MissingPoint(p));
            }
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition {
            upper_count,
            lower_count,
            blocks,
            colors: None,
        })
    }

    /// Attaches color words to both rows.
    pub fn with_colors(
        mut self,
        upper: Vec<Color>,
        lower: Vec<Color>,
    ) -> Result<SetPartition, PartitionError> {
        if upper.len() != self.upper_count || lower.len() != self.lower_count {
            return Err(PartitionError::ColorLength {
                upper: upper.len(),
                lower: lower.len(),
                k: self.upper_count,
                l: self.lower_count,
            });
        }
        self.colors = Some(ColorWords { upper, lower });
        Ok(self)
    }

    pub fn without_colors(mut self) -> SetPartition {
        self.colors = None;
        self
    }

    pub fn upper_count(&self) -> usize {
        self.upper_count
    }

    pub fn lower_count(&self) -> usize {
        self.lower_count
    }

    pub fn total_points(&self) -> usize {
        self.upper_count + self.lower_count
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn colors(&self) -> Option<&ColorWords> {
        self.colors.as_ref()
    }

    /// Index of the block containing `point`.
    pub fn block_of(&self, point: usize) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&point).is_ok())
    }

    pub fn is_pairing(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }

    /// The color of a global point, if colors are present.
    pub fn color_of(&self, point: usize) -> Option<Color> {
        let words = self.colors.as_ref()?;
        if point <= self.upper_count {
            words.upper.get(point - 1).copied()
        } else {
            words.lower.get(point - self.upper_count - 1).copied()
        }
    }

    // ---- stock diagrams ----------------------------------------------

    /// The empty diagram (0,0).
    pub fn empty() -> SetPartition {
        SetPartition::new(0, 0, vec![]).unwrap()
    }

    /// `m` through-strands.
    pub fn identity(m: usize) -> SetPartition {
        let blocks = (1..=m).map(|i| vec![i, m + i]).collect();
        SetPartition::new(m, m, blocks).unwrap()
    }

    /// The (0,2) pair: both lower points joined.
    pub fn pair() -> SetPartition {
        SetPartition::new(0, 2, vec![vec![1, 2]]).unwrap()
    }

    /// The (2,0) pair, adjoint of [`SetPartition::pair`].
    pub fn pair_upper() -> SetPartition {
        SetPartition::new(2, 0, vec![vec![1, 2]]).unwrap()
    }

    /// The (0,1) singleton.
    pub fn singleton() -> SetPartition {
        SetPartition::new(0, 1, vec![vec![1]]).unwrap()
    }

    /// The (1,2) partition with all three points in one block.
    pub fn fork() -> SetPartition {
        SetPartition::new(1, 2, vec![vec![1, 2, 3]]).unwrap()
    }

    /// The (2,2) strand crossing.
    pub fn crossing() -> SetPartition {
        SetPartition::new(2, 2, vec![vec![1, 4], vec![2, 3]]).unwrap()
    }

    // ---- boundary order ----------------------------------------------

    /// Position of a global point along the rectangle boundary: upper
    /// row left to right (`0..k`), then lower row right to left
    /// (`k..k+l`).
    pub fn boundary_position(&self, point: usize) -> usize {
        if point <= self.upper_count {
            point - 1
        } else {
            self.upper_count + (self.total_points() - point)
        }
    }

    /// Inverse of [`SetPartition::boundary_position`].
    pub fn point_at_boundary(&self, pos: usize) -> usize {
        if pos < self.upper_count {
            pos + 1
        } else {
            self.upper_count + self.total_points() - pos
        }
    }

    // ---- category operations -----------------------------------------

    /// Horizontal juxtaposition; `other`'s points are shifted past
    /// `self`'s row by row.
    pub fn tensor(&self, other: &SetPartition) -> SetPartition {
        let (k1, l1) = (self.upper_count, self.lower_count);
        let (k2, l2) = (other.upper_count, other.lower_count);
        let map_self = |p: usize| if p <= k1 { p } else { p + k2 };
        let map_other = |p: usize| {
            if p <= k2 {
                k1 + p
            } else {
                k1 + k2 + l1 + (p - k2)
            }
        };
        let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(self.blocks.len() + other.blocks.len());
        for b in &self.blocks {
            blocks.push(b.iter().map(|&p| map_self(p)).collect());
        }
        for b in &other.blocks {
            blocks.push(b.iter().map(|&p| map_other(p)).collect());
        }
        let mut result = SetPartition::new(k1 + k2, l1 + l2, blocks).unwrap();
        if let (Some(a), Some(b)) = (&self.colors, &other.colors) {
            let mut upper = a.upper.clone();
            upper.extend_from_slice(&b.upper);
            let mut lower = a.lower.clone();
            lower.extend_from_slice(&b.lower);
            result = result.with_colors(upper, lower).unwrap();
        }
        result
    }

    /// Vertical stacking `q . p`: glue `p`'s lower row onto `q`'s upper
    /// row. Connected components living entirely on the glued row are
    /// removed and counted; each stands for one closed loop (a factor of
    /// the leg dimension when realized).
    pub fn compose(
        q: &SetPartition,
        p: &SetPartition,
    ) -> Result<(SetPartition, usize), PartitionError> {
        if p.lower_count != q.upper_count {
            return Err(PartitionError::SignatureMismatch {
                expected: p.lower_count,
                found: q.upper_count,
            });
        }
        let k = p.upper_count;
        let mid = p.lower_count;
        let m = q.lower_count;
        // union-find ids: 0..k upper, k..k+mid middle, k+mid.. lower
        let mut dsu = Dsu::new(k + mid + m);
        for b in &p.blocks {
            for w in b.windows(2) {
                let a = if w[0] <= k { w[0] - 1 } else { k + (w[0] - k - 1) };
                let c = if w[1] <= k { w[1] - 1 } else { k + (w[1] - k - 1) };
                dsu.union(a, c);
            }
        }
        for b in &q.blocks {
            for w in b.windows(2) {
                let a = if w[0] <= mid {
                    k + (w[0] - 1)
                } else {
                    k + mid + (w[0] - mid - 1)
                };
                let c = if w[1] <= mid {
                    k + (w[1] - 1)
                } else {
                    k + mid + (w[1] - mid - 1)
                };
                dsu.union(a, c);
            }
        }
        let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for id in 0..k + mid + m {
            components.entry(dsu.find(id)).or_default().push(id);
        }
        let mut blocks = Vec::new();
        let mut loops = 0usize;
        for (_, members) in components {
            let outer: Vec<usize> = members
                .iter()
                .filter_map(|&id| {
                    if id < k {
                        Some(id + 1)
                    } else if id < k + mid {
                        None
                    } else {
                        Some(k + (id - k - mid) + 1)
                    }
                })
                .collect();
            if outer.is_empty() {
                // touches outer rows nowhere, so it is a closed loop --
                // unless it is empty because the middle row is empty
                if members.iter().any(|&id| id >= k && id < k + mid) {
                    loops += 1;
                }
            } else {
                blocks.push(outer);
            }
        }
        let mut result = SetPartition::new(k, m, blocks)?;
        if let (Some(cp), Some(cq)) = (&p.colors, &q.colors) {
            if cp.lower == cq.upper {
                result = result.with_colors(cp.upper.clone(), cq.lower.clone())?;
            }
        }
        Ok((result, loops))
    }

    /// Horizontal reflection: rows swap, colors swap rows and invert.
    pub fn involute(&self) -> SetPartition {
        let (k, l) = (self.upper_count, self.lower_count);
        let map = |p: usize| if p <= k { l + p } else { p - k };
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&p| map(p)).collect())
            .collect();
        let mut result = SetPartition::new(l, k, blocks).unwrap();
        if let Some(words) = &self.colors {
            let upper = words.lower.iter().map(|c| c.flip()).collect();
            let lower = words.upper.iter().map(|c| c.flip()).collect();
            result = result.with_colors(upper, lower).unwrap();
        }
        result
    }

    /// Frobenius rotation: moves the outermost point of one row to the
    /// same side of the other row. Rotating down then up on the same
    /// side is the identity.
    pub fn rotate(&self, side: Side, direction: Direction) -> Result<SetPartition, PartitionError> {
        let (k, l) = (self.upper_count, self.lower_count);
        let map: Box<dyn Fn(usize) -> usize> = match (side, direction) {
            (Side::Left, Direction::Down) => {
                if k == 0 {
                    return Err(PartitionError::EmptyRow("upper"));
                }
                Box::new(move |p| if p == 1 { k } else if p <= k { p - 1 } else { p })
            }
            (Side::Right, Direction::Down) => {
                if k == 0 {
                    return Err(PartitionError::EmptyRow("upper"));
                }
                Box::new(move |p| if p == k { k + l } else if p < k { p } else { p - 1 })
            }
            (Side::Left, Direction::Up) => {
                if l == 0 {
                    return Err(PartitionError::EmptyRow("lower"));
                }
                Box::new(move |p| if p == k + 1 { 1 } else if p <= k { p + 1 } else { p })
            }
            (Side::Right, Direction::Up) => {
                if l == 0 {
                    return Err(PartitionError::EmptyRow("lower"));
                }
                Box::new(move |p| if p == k + l { k + 1 } else if p <= k { p } else { p + 1 })
            }
        };
        let (new_k, new_l) = match direction {
            Direction::Down => (k - 1, l + 1),
            Direction::Up => (k + 1, l - 1),
        };
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&p| map(p)).collect())
            .collect();
        let mut result = SetPartition::new(new_k, new_l, blocks)?;
        if let Some(words) = &self.colors {
            let mut upper = words.upper.clone();
            let mut lower = words.lower.clone();
            match (side, direction) {
                (Side::Left, Direction::Down) => {
                    let c = upper.remove(0);
                    lower.insert(0, c.flip());
                }
                (Side::Right, Direction::Down) => {
                    let c = upper.pop().unwrap();
                    lower.push(c.flip());
                }
                (Side::Left, Direction::Up) => {
                    let c = lower.remove(0);
                    upper.insert(0, c.flip());
                }
                (Side::Right, Direction::Up) => {
                    let c = lower.pop().unwrap();
                    upper.push(c.flip());
                }
            }
            result = result.with_colors(upper, lower)?;
        }
        Ok(result)
    }

    /// One-line rotation of a (0,k) partition: the last point becomes
    /// the first.
    pub fn cyclic_rotate(&self) -> Result<SetPartition, PartitionError> {
        if self.upper_count != 0 || self.lower_count == 0 {
            return Err(PartitionError::EmptyRow("lower"));
        }
        let l = self.lower_count;
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&p| if p == l { 1 } else { p + 1 }).collect())
            .collect();
        let mut result = SetPartition::new(0, l, blocks)?;
        if let Some(words) = &self.colors {
            let mut lower = words.lower.clone();
            if let Some(c) = lower.pop() {
                lower.insert(0, c);
            }
            result = result.with_colors(vec![], lower)?;
        }
        Ok(result)
    }

    /// True iff no two blocks interleave along the rectangle boundary.
    pub fn is_noncrossing(&self) -> bool {
        let positions: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| {
                let mut v: Vec<usize> = b.iter().map(|&p| self.boundary_position(p)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        for i in 0..positions.len() {
            for j in i + 1..positions.len() {
                if blocks_interleave(&positions[i], &positions[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Color rule for pairings: endpoints on the same row must carry
    /// opposite colors, endpoints on different rows equal colors.
    pub fn color_compatible(&self) -> Result<bool, PartitionError> {
        if !self.is_pairing() {
            return Err(PartitionError::NotAPairing);
        }
        if self.colors.is_none() {
            return Err(PartitionError::MissingColors);
        }
        for b in &self.blocks {
            let (a, c) = (b[0], b[1]);
            let same_row =
                (a <= self.upper_count) == (c <= self.upper_count);
            let ca = self.color_of(a).unwrap();
            let cc = self.color_of(c).unwrap();
            let ok = if same_row { ca != cc } else { ca == cc };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    // ---- text format ---------------------------------------------------

    /// Parses the text form, e.g. `2|3 : [1,4][2,3]; colors=wb|bww`.
    pub fn parse(input: &str) -> Result<SetPartition, ParseError> {
        Parser::new(input).partition()
    }
}

/// Number of blocks in the common refinement-join of two partitions of
/// the same point set (blocks merged whenever they share a point). This
/// counts the index loops of the entrywise inner product of the two
/// realizations.
pub fn join_block_count(p: &SetPartition, q: &SetPartition) -> Result<usize, PartitionError> {
    if p.upper_count != q.upper_count || p.lower_count != q.lower_count {
        return Err(PartitionError::SignatureMismatch {
            expected: p.total_points(),
            found: q.total_points(),
        });
    }
    let n = p.total_points();
    let mut dsu = Dsu::new(n);
    for part in [p, q] {
        for b in &part.blocks {
            for w in b.windows(2) {
                dsu.union(w[0] - 1, w[1] - 1);
            }
        }
    }
    let roots: BTreeSet<usize> = (0..n).map(|i| dsu.find(i)).collect();
    Ok(roots.len())
}

fn blocks_interleave(a: &[usize], b: &[usize]) -> bool {
    // walk both sorted position lists; crossing shows up as >= 3
    // alternations of block labels
    let mut merged: Vec<(usize, bool)> = a
        .iter()
        .map(|&p| (p, false))
        .chain(b.iter().map(|&p| (p, true)))
        .collect();
    merged.sort_unstable();
    let mut changes = 0;
    for w in merged.windows(2) {
        if w[0].1 != w[1].1 {
            changes += 1;
        }
    }
    changes >= 3
}

// ---- enumeration -------------------------------------------------------

/// All noncrossing partitions of signature (k,l), canonical order.
pub fn enumerate_noncrossing_partitions(k: usize, l: usize) -> Vec<SetPartition> {
    let m = k + l;
    let boundary: Vec<usize> = (0..m).collect();
    let mut out = Vec::new();
    for blocks in nc_partitions_of(&boundary) {
        out.push(from_boundary_blocks(k, l, &blocks));
    }
    out.sort_unstable();
    out
}

/// All noncrossing pairings of signature (k,l); empty when k+l is odd.
pub fn enumerate_noncrossing_pairings(k: usize, l: usize) -> Vec<SetPartition> {
    let m = k + l;
    if m % 2 != 0 {
        return Vec::new();
    }
    let boundary: Vec<usize> = (0..m).collect();
    let mut out = Vec::new();
    for blocks in nc_pairings_of(&boundary) {
        out.push(from_boundary_blocks(k, l, &blocks));
    }
    out.sort_unstable();
    out
}

fn from_boundary_blocks(k: usize, l: usize, blocks: &[Vec<usize>]) -> SetPartition {
    let point_at = |pos: usize| if pos < k { pos + 1 } else { 2 * k + l - pos };
    let mapped = blocks
        .iter()
        .map(|b| b.iter().map(|&pos| point_at(pos)).collect())
        .collect();
    SetPartition::new(k, l, mapped).unwrap()
}

/// Noncrossing partitions of an ordered point list: the block of the
/// first point is chosen, the gaps between its members are partitioned
/// independently.
fn nc_partitions_of(points: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if points.is_empty() {
        return vec![vec![]];
    }
    let first = points[0];
    let rest = &points[1..];
    let mut results = Vec::new();
    for members in subsets(rest) {
        let mut block = vec![first];
        block.extend_from_slice(&members);
        // split the remaining points into the gaps delimited by the block
        let mut gaps: Vec<Vec<usize>> = vec![Vec::new(); members.len() + 1];
        for &p in rest {
            if members.binary_search(&p).is_ok() {
                continue;
            }
            let gap = members.partition_point(|&m| m < p);
            gaps[gap].push(p);
        }
        let mut partials: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for gap in gaps {
            let sub = nc_partitions_of(&gap);
            let mut next = Vec::new();
            for acc in &partials {
                for tail in &sub {
                    let mut merged = acc.clone();
                    merged.extend(tail.iter().cloned());
                    next.push(merged);
                }
            }
            partials = next;
        }
        results.extend(partials);
    }
    results
}

fn nc_pairings_of(points: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if points.is_empty() {
        return vec![vec![]];
    }
    let first = points[0];
    let mut results = Vec::new();
    // the partner must leave an even number of points on each side
    for j in (1..points.len()).step_by(2) {
        let partner = points[j];
        let inside = &points[1..j];
        let outside = &points[j + 1..];
        for left in nc_pairings_of(inside) {
            for right in nc_pairings_of(outside) {
                let mut blocks = vec![vec![first, partner]];
                blocks.extend(left.iter().cloned());
                blocks.extend(right.iter().cloned());
                results.push(blocks);
            }
        }
    }
    results
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &item in items {
        let mut extended: Vec<Vec<usize>> = out
            .iter()
            .map(|s| {
                let mut t = s.clone();
                t.push(item);
                t
            })
            .collect();
        out.append(&mut extended);
    }
    out
}

// ---- union-find ----------------------------------------------------------

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

// ---- text format ----------------------------------------------------------

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{} : ", self.upper_count, self.lower_count)?;
        for b in &self.blocks {
            write!(f, "[")?;
            for (i, p) in b.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", p)?;
            }
            write!(f, "]")?;
        }
        if let Some(words) = &self.colors {
            write!(f, "; colors={}", words)?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Parser<'a> {
        Parser {
            input: input.as_bytes(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn skip_spaces(&mut self) {
        while self.peek() == Some(b' ') {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::new(
                self.pos,
                format!("expected '{}'", c as char),
            ))
        }
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ParseError::new(start, "expected a number"));
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ParseError::new(start, "number out of range"))
    }

    fn partition(&mut self) -> Result<SetPartition, ParseError> {
        self.skip_spaces();
        let k = self.number()?;
        self.skip_spaces();
        self.expect(b'|')?;
        self.skip_spaces();
        let l = self.number()?;
        self.skip_spaces();
        self.expect(b':')?;
        let mut blocks = Vec::new();
        loop {
            self.skip_spaces();
            match self.peek() {
                Some(b'[') => {
                    self.pos += 1;
                    let mut block = Vec::new();
                    loop {
                        self.skip_spaces();
                        block.push(self.number()?);
                        self.skip_spaces();
                        match self.peek() {
                            Some(b',') => self.pos += 1,
                            Some(b']') => {
                                self.pos += 1;
                                break;
                            }
                            _ => {
                                return Err(ParseError::new(self.pos, "expected ',' or ']'"));
                            }
                        }
                    }
                    blocks.push(block);
                }
                _ => break,
            }
        }
        let start = self.pos;
        let mut result = SetPartition::new(k, l, blocks)
            .map_err(|e| ParseError::new(start, e.to_string()))?;
        self.skip_spaces();
        if self.peek() == Some(b';') {
            self.pos += 1;
            self.skip_spaces();
            for c in b"colors=" {
                self.expect(*c)?;
            }
            let upper = self.color_word()?;
            self.expect(b'|')?;
            let lower = self.color_word()?;
            result = result
                .with_colors(upper, lower)
                .map_err(|e| ParseError::new(start, e.to_string()))?;
        }
        self.skip_spaces();
        if self.pos != self.input.len() {
            return Err(ParseError::new(self.pos, "trailing input"));
        }
        Ok(result)
    }

    fn color_word(&mut self) -> Result<Vec<Color>, ParseError> {
        let mut word = Vec::new();
        while let Some(c) = self.peek() {
            match Color::from_letter(c as char) {
                Some(color) => {
                    word.push(color);
                    self.pos += 1;
                }
                None => break,
            }
        }
        Ok(word)
    }
}

// ---- JSON form -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PartitionJson {
    k: usize,
    l: usize,
    blocks: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    colors: Option<ColorsJson>,
}

#[derive(Serialize, Deserialize)]
struct ColorsJson {
    upper: String,
    lower: String,
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PartitionJson {
            k: self.upper_count,
            l: self.lower_count,
            blocks: self.blocks.clone(),
            colors: self.colors.as_ref().map(|w| ColorsJson {
                upper: ColorWords::word_string(&w.upper),
                lower: ColorWords::word_string(&w.lower),
            }),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetPartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = PartitionJson::deserialize(deserializer)?;
        let mut p = SetPartition::new(raw.k, raw.l, raw.blocks).map_err(D::Error::custom)?;
        if let Some(words) = raw.colors {
            let parse_word = |s: &str| -> Result<Vec<Color>, D::Error> {
                s.chars()
                    .map(|c| {
                        Color::from_letter(c)
                            .ok_or_else(|| D::Error::custom(format!("bad color letter '{}'", c)))
                    })
                    .collect()
            };
            p = p
                .with_colors(parse_word(&words.upper)?, parse_word(&words.lower)?)
                .map_err(D::Error::custom)?;
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(k: usize, l: usize, blocks: &[&[usize]]) -> SetPartition {
        SetPartition::new(k, l, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    /// All set partitions of {1..n} via restricted growth strings; the
    /// brute-force oracle for enumeration counts.
    fn all_set_partitions(k: usize, l: usize) -> Vec<SetPartition> {
        let n = k + l;
        if n == 0 {
            return vec![SetPartition::empty()];
        }
        let mut out = Vec::new();
        let mut rgs = vec![0usize; n];
        'emit: loop {
            let nblocks = rgs.iter().copied().max().unwrap() + 1;
            let mut blocks = vec![Vec::new(); nblocks];
            for (i, &b) in rgs.iter().enumerate() {
                blocks[b].push(i + 1);
            }
            out.push(SetPartition::new(k, l, blocks).unwrap());
            // advance the restricted growth string
            let mut i = n - 1;
            while i > 0 {
                let cap = rgs[..i].iter().copied().max().unwrap() + 1;
                if rgs[i] < cap {
                    rgs[i] += 1;
                    for r in rgs[i + 1..].iter_mut() {
                        *r = 0;
                    }
                    continue 'emit;
                }
                i -= 1;
            }
            return out;
        }
    }

    #[test]
    fn canonicalize_sorts() {
        let p = SetPartition::new(0, 2, vec![vec![2, 1]]).unwrap();
        assert_eq!(p.blocks(), &[vec![1, 2]]);
        let q = SetPartition::new(1, 2, vec![vec![1], vec![2, 3]]).unwrap();
        assert_eq!(q.blocks(), &[vec![1], vec![2, 3]]);
    }

    #[test]
    fn canonicalize_rejects_bad_input() {
        assert_eq!(
            SetPartition::new(0, 3, vec![vec![1, 2], vec![2, 3]]),
            Err(PartitionError::DuplicatePoint(2))
        );
        assert_eq!(
            SetPartition::new(0, 3, vec![vec![1, 2]]),
            Err(PartitionError::MissingPoint(3))
        );
        assert_eq!(
            SetPartition::new(0, 1, vec![vec![1, 2]]),
            Err(PartitionError::OutOfRange { point: 2, max: 1 })
        );
    }

    #[test]
    fn tensor_examples() {
        let pp = SetPartition::pair().tensor(&SetPartition::pair());
        assert_eq!(pp, part(0, 4, &[&[1, 2], &[3, 4]]));
        let id2 = SetPartition::identity(1).tensor(&SetPartition::identity(1));
        assert_eq!(id2, part(2, 2, &[&[1, 3], &[2, 4]]));
    }

    #[test]
    fn tensor_drawn_example() {
        // two diagrams side by side: a (4,5) with a (5,3)
        let x = part(4, 5, &[&[1, 5], &[2, 3, 4, 6, 7], &[8, 9]]);
        let y = part(5, 3, &[&[1, 2], &[4, 5], &[3, 6, 7, 8]]);
        let expect = part(
            9,
            8,
            &[
                &[1, 10],
                &[2, 3, 4, 11, 12],
                &[13, 14],
                &[5, 6],
                &[8, 9],
                &[7, 15, 16, 17],
            ],
        );
        assert_eq!(x.tensor(&y), expect);
    }

    #[test]
    fn compose_identity_and_loop() {
        let p = part(1, 2, &[&[1, 2], &[3]]);
        let (r, loops) = SetPartition::compose(&SetPartition::identity(2), &p).unwrap();
        assert_eq!(r, p);
        assert_eq!(loops, 0);

        let (r, loops) =
            SetPartition::compose(&SetPartition::pair_upper(), &SetPartition::pair()).unwrap();
        assert_eq!(r, SetPartition::empty());
        assert_eq!(loops, 1);
    }

    #[test]
    fn compose_drawn_example() {
        // stacking the drawn (4,5) under the drawn (5,3) closes one loop
        let p = part(4, 5, &[&[1, 5], &[2, 3, 4, 6, 7], &[8, 9]]);
        let q = part(5, 3, &[&[1, 2], &[4, 5], &[3, 6, 7, 8]]);
        let (r, loops) = SetPartition::compose(&q, &p).unwrap();
        assert_eq!(r, part(4, 3, &[&[1, 2, 3, 4, 5, 6, 7]]));
        assert_eq!(loops, 1);
    }

    #[test]
    fn involute_examples() {
        assert_eq!(SetPartition::pair().involute(), SetPartition::pair_upper());
        let x = part(4, 5, &[&[1, 5], &[2, 3, 4, 6, 7], &[8, 9]]);
        assert_eq!(x.involute(), part(5, 4, &[&[1, 6], &[2, 3, 7, 8, 9], &[4, 5]]));
    }

    #[test]
    fn involution_is_involutive() {
        for p in enumerate_noncrossing_partitions(2, 3) {
            assert_eq!(p.involute().involute(), p);
        }
    }

    #[test]
    fn involute_antihomomorphism_for_compose() {
        for p in enumerate_noncrossing_partitions(1, 2) {
            for q in enumerate_noncrossing_partitions(2, 2) {
                let (qp, c1) = SetPartition::compose(&q, &p).unwrap();
                let (pq, c2) =
                    SetPartition::compose(&p.involute(), &q.involute()).unwrap();
                assert_eq!(qp.involute(), pq);
                assert_eq!(c1, c2);
            }
        }
    }

    #[test]
    fn rotate_examples() {
        let r = SetPartition::identity(1)
            .rotate(Side::Left, Direction::Down)
            .unwrap();
        assert_eq!(r, SetPartition::pair());
        assert!(SetPartition::pair().rotate(Side::Left, Direction::Down).is_err());
    }

    #[test]
    fn rotate_round_trips() {
        for k in 0..=3 {
            for l in 0..=(6 - k) {
                for p in enumerate_noncrossing_partitions(k, l) {
                    for side in [Side::Left, Side::Right] {
                        if k > 0 {
                            let down = p.rotate(side, Direction::Down).unwrap();
                            assert_eq!(down.rotate(side, Direction::Up).unwrap(), p);
                            assert!(down.is_noncrossing());
                        }
                        if l > 0 {
                            let up = p.rotate(side, Direction::Up).unwrap();
                            assert_eq!(up.rotate(side, Direction::Down).unwrap(), p);
                            assert!(up.is_noncrossing());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cyclic_rotate_examples() {
        let p = part(0, 4, &[&[1, 2], &[3, 4]]);
        assert_eq!(p.cyclic_rotate().unwrap(), part(0, 4, &[&[1, 4], &[2, 3]]));
        let mut q = p.clone();
        for _ in 0..4 {
            q = q.cyclic_rotate().unwrap();
        }
        assert_eq!(q, p);
    }

    #[test]
    fn cyclic_rotate_preserves_noncrossing() {
        for l in 1..=8 {
            for p in enumerate_noncrossing_partitions(0, l) {
                assert!(p.cyclic_rotate().unwrap().is_noncrossing());
            }
        }
    }

    #[test]
    fn noncrossing_examples() {
        assert!(!part(0, 4, &[&[1, 3], &[2, 4]]).is_noncrossing());
        // (3,4): upper triple joined to lower points 2,3; lower 1,4 singletons
        let p = part(3, 4, &[&[1, 2, 3, 5, 6], &[4], &[7]]);
        assert!(p.is_noncrossing());
        // (4,4) with two transversal blocks crossing each other
        let q = part(4, 4, &[&[1], &[4], &[3, 6], &[2, 7, 8], &[5]]);
        assert!(!q.is_noncrossing());
    }

    #[test]
    fn enumeration_matches_catalan() {
        let catalan = [1usize, 1, 2, 5, 14, 42, 132, 429, 1430];
        for m in 0..=8 {
            assert_eq!(enumerate_noncrossing_partitions(0, m).len(), catalan[m]);
        }
        for halves in 1..=4 {
            assert_eq!(
                enumerate_noncrossing_pairings(0, 2 * halves).len(),
                catalan[halves]
            );
        }
        assert!(enumerate_noncrossing_pairings(0, 3).is_empty());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for k in 0..=3 {
            for l in 0..=(7 - k) {
                let brute: Vec<SetPartition> = {
                    let mut v: Vec<SetPartition> = all_set_partitions(k, l)
                        .into_iter()
                        .filter(|p| p.is_noncrossing())
                        .collect();
                    v.sort_unstable();
                    v
                };
                assert_eq!(enumerate_noncrossing_partitions(k, l), brute, "k={k} l={l}");
                let brute_pairs: Vec<SetPartition> = brute
                    .iter()
                    .filter(|p| p.is_pairing())
                    .cloned()
                    .collect();
                assert_eq!(enumerate_noncrossing_pairings(k, l), brute_pairs);
            }
        }
    }

    #[test]
    fn compose_associativity_with_loops() {
        // stacked triples agree in both orders, including loop totals
        let sigs = enumerate_noncrossing_partitions(2, 1);
        let mids = enumerate_noncrossing_partitions(1, 2);
        let tops = enumerate_noncrossing_partitions(2, 2);
        for a in &sigs {
            for b in &mids {
                for c in &tops {
                    let (ab, c1) = SetPartition::compose(a, b).unwrap();
                    let (abc_left, c2) = SetPartition::compose(&ab, c).unwrap();
                    let (bc, d1) = SetPartition::compose(b, c).unwrap();
                    let (abc_right, d2) = SetPartition::compose(a, &bc).unwrap();
                    assert_eq!(abc_left, abc_right);
                    assert_eq!(c1 + c2, d1 + d2);
                }
            }
        }
    }

    #[test]
    fn color_compatibility_rules() {
        let id = SetPartition::identity(1)
            .with_colors(vec![Color::White], vec![Color::White])
            .unwrap();
        assert!(id.color_compatible().unwrap());
        let pair_ww = SetPartition::pair()
            .with_colors(vec![], vec![Color::White, Color::White])
            .unwrap();
        assert!(!pair_ww.color_compatible().unwrap());
        let pair_wb = SetPartition::pair()
            .with_colors(vec![], vec![Color::White, Color::Black])
            .unwrap();
        assert!(pair_wb.color_compatible().unwrap());
        let nonpairing = part(0, 3, &[&[1, 2, 3]])
            .with_colors(vec![], ColorWords::alternating(3))
            .unwrap();
        assert!(nonpairing.color_compatible().is_err());
    }

    #[test]
    fn text_round_trip() {
        let p = SetPartition::parse("2|3 : [1,4][2,3][5]").unwrap();
        assert_eq!(p, part(2, 3, &[&[1, 4], &[2, 3], &[5]]));
        assert_eq!(p.to_string(), "2|3 : [1,4][2,3][5]");

        let colored = SetPartition::parse("1|1 : [1,2]; colors=w|w").unwrap();
        assert_eq!(colored.to_string(), "1|1 : [1,2]; colors=w|w");
        assert_eq!(SetPartition::parse(&colored.to_string()).unwrap(), colored);

        assert_eq!(SetPartition::parse("0|0 : ").unwrap(), SetPartition::empty());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = SetPartition::parse("2|x : [1,2]").unwrap_err();
        assert_eq!(err.position, 2);
        let err = SetPartition::parse("0|2 : [1,222]").unwrap_err();
        assert!(err.message.contains("out of range") || err.message.contains("range"));
    }

    #[test]
    fn serialize_round_trips_all_small() {
        for k in 0..=2 {
            for l in 0..=4 {
                if k + l > 6 {
                    continue;
                }
                for p in enumerate_noncrossing_partitions(k, l) {
                    assert_eq!(SetPartition::parse(&p.to_string()).unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn serialize_injective_on_canonical_forms() {
        let mut seen = std::collections::BTreeSet::new();
        for k in 0..=3 {
            for l in 0..=(6 - k) {
                for p in enumerate_noncrossing_partitions(k, l) {
                    assert!(seen.insert(p.to_string()), "duplicate text for {}", p);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = part(2, 2, &[&[1, 4], &[2, 3]])
            .with_colors(
                vec![Color::White, Color::Black],
                vec![Color::White, Color::Black],
            )
            .unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<SetPartition>(&json).unwrap(), p);
    }

    #[test]
    fn join_counts_merged_blocks() {
        let p = part(0, 4, &[&[1, 2], &[3, 4]]);
        let q = part(0, 4, &[&[1, 4], &[2, 3]]);
        assert_eq!(join_block_count(&p, &p).unwrap(), 2);
        assert_eq!(join_block_count(&p, &q).unwrap(), 1);
    }
}
