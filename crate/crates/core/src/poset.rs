//! Finite strict partial orders and their interval calculus.

use std::fmt;

use crate::error::{Error, Result};
use crate::graded::GradedSpace;

/// A finite strict partial order on `0..n`, stored transitively closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    labels: Vec<String>,
    lt: Vec<Vec<bool>>,
}

impl Poset {
    /// Transitive closure of the given relations `a < b`.
    pub fn from_relations(n: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let mut lt = vec![vec![false; n]; n];
        for &(a, b) in relations {
            for element in [a, b] {
                if element >= n {
                    return Err(Error::ElementOutOfRange { element, n });
                }
            }
            lt[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if lt[i][k] {
                    for j in 0..n {
                        if lt[k][j] {
                            lt[i][j] = true;
                        }
                    }
                }
            }
        }
        if let Some(p) = (0..n).find(|&p| lt[p][p]) {
            return Err(Error::CycleDetected(p));
        }
        Ok(Poset {
            n,
            labels: (0..n).map(|p| p.to_string()).collect(),
            lt,
        })
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_relations(n, &[]).expect("no relations")
    }

    /// The total order `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        let covers: Vec<_> = (1..n).map(|p| (p - 1, p)).collect();
        Self::from_relations(n, &covers).expect("a chain is acyclic")
    }

    /// # Panics
    /// If the label count differs from the element count.
    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n, "one label per element");
        self.labels = labels;
        self
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: usize) -> &str {
        &self.labels[p]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.lt[a][b]
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        a == b || self.lt[a][b]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.le(a, b) || self.lt(b, a)
    }

    /// Every strict relation `a < b`, in lexicographic order.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if self.lt[a][b] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// The covering relations of the Hasse diagram.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.relations()
            .into_iter()
            .filter(|&(a, b)| !(0..self.n).any(|c| self.lt[a][c] && self.lt[c][b]))
            .collect()
    }

    /// Check the order axioms directly on the stored relation.
    pub fn is_strict_order(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| !self.lt[a][a])
            && (0..n).all(|a| (0..n).all(|b| !(self.lt[a][b] && self.lt[b][a])))
            && (0..n).all(|a| {
                (0..n).all(|b| (0..n).all(|c| !(self.lt[a][b] && self.lt[b][c]) || self.lt[a][c]))
            })
    }

    pub fn is_interval(&self, members: &[usize]) -> bool {
        let mut inside = vec![false; self.n];
        for &p in members {
            inside[p] = true;
        }
        for &p in members {
            for &q in members {
                if self.lt[p][q] && (0..self.n).any(|r| !inside[r] && self.lt[p][r] && self.lt[r][q]) {
                    return false;
                }
            }
        }
        true
    }

    /// No member of the set lies above an element outside it.
    pub fn is_down_set(&self, members: &[usize]) -> bool {
        members
            .iter()
            .all(|&p| (0..self.n).all(|q| !self.lt[q][p] || members.contains(&q)))
    }

    /// All intervals including the empty one, ordered by size and then by
    /// member list.
    pub fn intervals(&self) -> Vec<Interval> {
        let mut out: Vec<Interval> = (0u64..1 << self.n)
            .map(|mask| Interval::from_mask(mask, self.n))
            .filter(|i| self.is_interval(i.members()))
            .collect();
        out.sort_by(Interval::canonical_cmp);
        out
    }

    /// Disjoint nonempty intervals with interval union, no element of a
    /// later entry lying below an element of an earlier one.
    pub fn is_adjacent_tuple(&self, tuple: &[Interval]) -> bool {
        let mut seen = vec![false; self.n];
        for i in tuple {
            if i.is_empty() || !self.is_interval(i.members()) {
                return false;
            }
            for &p in i.members() {
                if p >= self.n || seen[p] {
                    return false;
                }
                seen[p] = true;
            }
        }
        let union: Vec<usize> = (0..self.n).filter(|&p| seen[p]).collect();
        if !self.is_interval(&union) {
            return false;
        }
        for (j, earlier) in tuple.iter().enumerate() {
            for later in &tuple[j + 1..] {
                for &a in earlier.members() {
                    for &b in later.members() {
                        if self.lt[b][a] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Every adjacent pair `(I, J)`, grouped by union in canonical order.
    pub fn adjacent_pairs(&self) -> Vec<(Interval, Interval)> {
        let mut out = Vec::new();
        for u in self.intervals() {
            let m = u.len();
            for mask in 1..(1u64 << m).saturating_sub(1) {
                let (i, j) = u.split_mask(mask);
                if self.is_adjacent_tuple(&[i.clone(), j.clone()]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Every adjacent triple `(I, J, K)`, grouped by union.
    pub fn adjacent_triples(&self) -> Vec<(Interval, Interval, Interval)> {
        let mut out = Vec::new();
        for u in self.intervals() {
            let m = u.len() as u32;
            if m < 3 {
                continue;
            }
            for code in 0..3u64.pow(m) {
                let mut parts = [vec![], vec![], vec![]];
                let mut c = code;
                for &p in u.members() {
                    parts[(c % 3) as usize].push(p);
                    c /= 3;
                }
                let [a, b, d] = parts.map(Interval::new);
                if self.is_adjacent_tuple(&[a.clone(), b.clone(), d.clone()]) {
                    out.push((a, b, d));
                }
            }
        }
        out
    }

    /// The unique decomposition into trivially ordered levels, each lying
    /// entirely above the previous ones, if the order admits one.
    pub fn find_stack(&self) -> Option<StackDecomposition> {
        let mut remaining: Vec<usize> = (0..self.n).collect();
        let mut placed: Vec<usize> = Vec::new();
        let mut blocks = Vec::new();
        while !remaining.is_empty() {
            // Any valid stack must start with the minimal elements.
            let level: Vec<usize> = remaining
                .iter()
                .copied()
                .filter(|&p| !remaining.iter().any(|&q| self.lt[q][p]))
                .collect();
            remaining.retain(|p| !level.contains(p));
            if !level.iter().all(|&p| placed.iter().all(|&q| self.lt[q][p])) {
                return None;
            }
            placed.extend(&level);
            blocks.push(Interval::new(level));
        }
        let stack = StackDecomposition { blocks };
        debug_assert!(stack.is_valid_for(self));
        Some(stack)
    }

    /// Linear extension picking the smallest available minimal element first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n);
        let mut used = vec![false; self.n];
        while out.len() < self.n {
            let next = (0..self.n)
                .find(|&p| !used[p] && (0..self.n).all(|q| used[q] || !self.lt[q][p]))
                .expect("a strict order has a minimal element");
            used[next] = true;
            out.push(next);
        }
        out
    }

    /// The order `p < q` iff `k(p) < k(q)`, where `k(p)` is the single degree
    /// carrying `spaces[p]`; zero spaces are incomparable to everything.
    pub fn order_k(spaces: &[GradedSpace]) -> Result<Self> {
        let degrees = spaces
            .iter()
            .enumerate()
            .map(|(p, s)| s.concentrated_degree(p))
            .collect::<Result<Vec<_>>>()?;
        let mut rel = Vec::new();
        for (p, kp) in degrees.iter().enumerate() {
            for (q, kq) in degrees.iter().enumerate() {
                if let (Some(a), Some(b)) = (kp, kq) {
                    if a < b {
                        rel.push((p, q));
                    }
                }
            }
        }
        Self::from_relations(spaces.len(), &rel)
    }

    /// The order on `2n` elements used for fast-slow assembly: element `p`
    /// is the minus copy of `p`, element `n + p` the plus copy. Every minus
    /// copy lies below every plus copy.
    pub fn doubled(minus: &Poset, plus: &Poset) -> Result<Self> {
        if minus.n != plus.n {
            return Err(Error::ShapeMismatch(format!(
                "orders have {} and {} elements",
                minus.n, plus.n
            )));
        }
        let n = minus.n;
        let mut rel = Vec::new();
        for q in 0..n {
            for p in 0..n {
                rel.push((q, n + p));
                if minus.lt(q, p) {
                    rel.push((q, p));
                }
                if plus.lt(q, p) {
                    rel.push((n + q, n + p));
                }
            }
        }
        let labels = minus
            .labels
            .iter()
            .map(|l| format!("{l}-"))
            .chain(plus.labels.iter().map(|l| format!("{l}+")))
            .collect();
        Ok(Self::from_relations(2 * n, &rel)?.with_labels(labels))
    }

    /// Restriction of the order to the given elements, renumbered in order.
    pub fn restrict(&self, members: &[usize]) -> Self {
        let rel: Vec<_> = members
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| {
                members
                    .iter()
                    .enumerate()
                    .filter(move |&(_, &b)| self.lt[a][b])
                    .map(move |(j, _)| (i, j))
            })
            .collect();
        Self::from_relations(members.len(), &rel)
            .expect("restriction of an order is an order")
            .with_labels(members.iter().map(|&p| self.labels[p].clone()).collect())
    }
}

/// A set of poset elements, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct Interval(Vec<usize>);

impl Interval {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        Interval(members)
    }

    pub fn empty() -> Self {
        Interval(Vec::new())
    }

    pub fn singleton(p: usize) -> Self {
        Interval(vec![p])
    }

    pub fn full(n: usize) -> Self {
        Interval((0..n).collect())
    }

    fn from_mask(mask: u64, n: usize) -> Self {
        Interval((0..n).filter(|&p| mask >> p & 1 == 1).collect())
    }

    fn split_mask(&self, mask: u64) -> (Interval, Interval) {
        let (a, b): (Vec<_>, Vec<_>) = self
            .0
            .iter()
            .enumerate()
            .partition(|&(i, _)| mask >> i & 1 == 1);
        (
            Interval(a.into_iter().map(|(_, &p)| p).collect()),
            Interval(b.into_iter().map(|(_, &p)| p).collect()),
        )
    }

    /// Order by size, then by member list.
    pub fn canonical_cmp(a: &Interval, b: &Interval) -> std::cmp::Ordering {
        (a.len(), &a.0).cmp(&(b.len(), &b.0))
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn union(&self, other: &Interval) -> Interval {
        Interval::new(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Position of `p` within the sorted member list.
    pub fn position(&self, p: usize) -> Option<usize> {
        self.0.binary_search(&p).ok()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl From<Vec<usize>> for Interval {
    fn from(v: Vec<usize>) -> Self {
        Interval::new(v)
    }
}

/// Ordered trivially-ordered blocks, each entirely above its predecessors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackDecomposition {
    pub blocks: Vec<Interval>,
}

impl StackDecomposition {
    pub fn is_valid_for(&self, poset: &Poset) -> bool {
        let mut seen = vec![false; poset.len()];
        for b in &self.blocks {
            if b.is_empty() {
                return false;
            }
            for &p in b.members() {
                if p >= poset.len() || seen[p] {
                    return false;
                }
                seen[p] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return false;
        }
        for (i, lower) in self.blocks.iter().enumerate() {
            for &a in lower.members() {
                for &b in lower.members() {
                    if poset.lt(a, b) {
                        return false;
                    }
                }
                for upper in &self.blocks[i + 1..] {
                    if !upper.members().iter().all(|&b| poset.lt(a, b)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(v: &[usize]) -> Interval {
        Interval::new(v.to_vec())
    }

    #[test]
    fn closure_adds_transitive_relation() {
        let p = Poset::from_relations(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(p.lt(0, 2));
        assert!(p.is_strict_order());
    }

    #[test]
    fn cycle_is_rejected() {
        assert!(matches!(
            Poset::from_relations(2, &[(0, 1), (1, 0)]),
            Err(Error::CycleDetected(_))
        ));
        assert!(matches!(
            Poset::from_relations(2, &[(0, 5)]),
            Err(Error::ElementOutOfRange { element: 5, n: 2 })
        ));
    }

    #[test]
    fn chain_intervals_skip_gaps() {
        let p = Poset::chain(3);
        let ivs = p.intervals();
        assert_eq!(ivs.len(), 7);
        assert!(!ivs.contains(&iv(&[0, 2])));
        assert_eq!(ivs[0], Interval::empty());
        assert_eq!(Poset::antichain(3).intervals().len(), 8);
        let v = Poset::from_relations(3, &[(0, 2), (1, 2)]).unwrap();
        assert_eq!(v.intervals().len(), 8);
    }

    #[test]
    fn adjacency_examples() {
        let p = Poset::chain(3);
        assert!(p.is_adjacent_tuple(&[iv(&[0]), iv(&[1])]));
        assert!(!p.is_adjacent_tuple(&[iv(&[1]), iv(&[0])]));
        assert!(!p.is_adjacent_tuple(&[iv(&[0]), iv(&[2])]));
        assert!(!p.is_adjacent_tuple(&[Interval::empty(), iv(&[0])]));
    }

    #[test]
    fn stacks() {
        let blocks = Poset::chain(3).find_stack().unwrap().blocks;
        assert_eq!(blocks, vec![iv(&[0]), iv(&[1]), iv(&[2])]);
        let blocks = Poset::antichain(3).find_stack().unwrap().blocks;
        assert_eq!(blocks, vec![iv(&[0, 1, 2])]);
        // a=0 < c=2, b=1 < c=2, b=1 < d=3
        let n = Poset::from_relations(4, &[(0, 2), (1, 2), (1, 3)]).unwrap();
        assert!(n.find_stack().is_none());
    }

    #[test]
    fn order_k_examples() {
        let s = |pairs: &[(i32, usize)]| GradedSpace::from_pairs(pairs.iter().copied());
        let p = Poset::order_k(&[s(&[(0, 1)]), s(&[(1, 1)])]).unwrap();
        assert!(p.lt(0, 1));
        let p = Poset::order_k(&[s(&[(1, 1)]), s(&[(1, 1)]), s(&[])]).unwrap();
        assert!(p.relations().is_empty());
        assert!(matches!(
            Poset::order_k(&[s(&[(0, 1), (2, 1)])]),
            Err(Error::DegreeNotConcentrated { element: 0, .. })
        ));
    }

    #[test]
    fn doubled_examples() {
        let one = Poset::antichain(1);
        let d = Poset::doubled(&one, &one).unwrap();
        assert_eq!(d.relations(), vec![(0, 1)]);

        // q = 0, p = 1, q <_{-1} p
        let minus = Poset::from_relations(2, &[(0, 1)]).unwrap();
        let plus = Poset::antichain(2);
        let d = Poset::doubled(&minus, &plus).unwrap();
        let mut expected = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)];
        expected.sort();
        assert_eq!(d.relations(), expected);
    }

    #[test]
    fn pairs_and_triples_of_a_chain() {
        let p = Poset::chain(3);
        let pairs = p.adjacent_pairs();
        assert!(pairs.contains(&(iv(&[0]), iv(&[1, 2]))));
        assert!(!pairs.contains(&(iv(&[1, 2]), iv(&[0]))));
        assert_eq!(p.adjacent_triples(), vec![(iv(&[0]), iv(&[1]), iv(&[2]))]);
    }
}
