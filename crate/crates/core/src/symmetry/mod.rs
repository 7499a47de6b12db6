//! Canonical representatives of block systems and torus points under the
//! expanded symmetry group.

use crate::blocks::BlockSystem;
use crate::config::{FormAction, WeightConfig};

/// The lexicographically least encoding over a symmetry orbit.
pub type CanonicalKey = BlockSystem;

const UNSET: u16 = u16::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    /// Form index read at this node's depth.
    value: u16,
    first_child: u32,
    child_count: u32,
    /// Element index when the node's prefix determines a unique element.
    leaf: u32,
}

/// Lexicographic-minimum search over all images of a partition.
///
/// The image of `p` under `g` has label sequence `p[g^-1(0)], p[g^-1(1)], ...`
/// re-encoded in first-seen order. Distinct inverse permutations are sorted
/// and stored as a trie so that elements sharing a prefix are compared once
/// and whole subtrees are cut as soon as their prefix exceeds the best seen.
#[derive(Clone, Debug)]
pub struct Canonicalizer {
    d: usize,
    inverses: Vec<Vec<u16>>,
    /// `forward[e][x]` is the position form `x` moves to under element `e`.
    forward: Vec<Vec<u16>>,
    /// `meet[x * d + y]`: the least position any element can give the later
    /// of forms `x` and `y`.
    meet: Vec<u16>,
    /// Elements by the form they read at each position: those with
    /// `inverses[e][j] == y` are `by_position[starts[j * d + y]..starts[j * d + y + 1]]`.
    by_position: Vec<u32>,
    starts: Vec<u32>,
    nodes: Vec<Node>,
    root: (u32, u32),
    /// Depth by which every trie path has reached a single element.
    trie_depth: usize,
}

/// Most automorphisms kept for pruning during one search.
const MAX_AUTOMORPHISMS: usize = 32;

struct Search<'a> {
    c: &'a Canonicalizer,
    p: &'a [u16],
    map: Vec<u16>,
    trail: Vec<u16>,
    next: u16,
    best: Vec<u16>,
    valid: usize,
    /// Trie values on the current path, a prefix of the inverse permutation.
    path: Vec<u16>,
    /// Element whose image is the current best, and the change count then.
    best_elem: Option<usize>,
    changes: u64,
    changes_at_best: u64,
    /// Form permutations preserving the partition, found from tied images.
    automorphisms: Vec<Vec<u16>>,
}

impl<'a> Search<'a> {
    #[inline]
    fn label(&self, l: u16) -> u16 {
        match self.map[l as usize] {
            UNSET => self.next,
            m => m,
        }
    }

    /// Returns false if position `depth` reading block `l` is worse than best.
    #[inline]
    fn step(&mut self, depth: usize, l: u16) -> bool {
        let lab = self.label(l);
        if depth < self.valid {
            if lab > self.best[depth] {
                return false;
            }
            if lab < self.best[depth] {
                self.best[depth] = lab;
                self.valid = depth + 1;
                self.changes += 1;
            }
        } else {
            self.best[depth] = lab;
            self.valid = depth + 1;
            self.changes += 1;
        }
        if lab == self.next {
            self.map[l as usize] = lab;
            self.trail.push(l);
            self.next += 1;
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let l = self.trail.pop().unwrap();
            self.map[l as usize] = UNSET;
            self.next -= 1;
        }
    }

    /// True if a known automorphism maps the current path to a smaller
    /// prefix. Both prefixes give the same images, and the smaller one has
    /// already been searched.
    fn covered(&self) -> bool {
        self.automorphisms.iter().any(|a| {
            for &x in &self.path {
                let y = a[x as usize];
                if y != x {
                    return y < x;
                }
            }
            false
        })
    }

    fn scan(&mut self, elem: usize, from: usize) {
        let mark = self.trail.len();
        let inv = &self.c.inverses[elem];
        let mut complete = true;
        for j in from..self.c.d {
            if !self.step(j, self.p[inv[j] as usize]) {
                complete = false;
                break;
            }
        }
        self.undo(mark);
        if complete {
            self.finish(elem);
        }
    }

    /// Records a fully read image: either the new best or a tie with it.
    fn finish(&mut self, elem: usize) {
        match self.best_elem {
            Some(b) if self.changes == self.changes_at_best => {
                if self.automorphisms.len() + 2 <= MAX_AUTOMORPHISMS {
                    // Same image: inv_b[j] and inv[j] lie in matching blocks.
                    let (inv, inv_b) = (&self.c.inverses[elem], &self.c.inverses[b]);
                    let mut forward = vec![0u16; self.c.d];
                    let mut backward = vec![0u16; self.c.d];
                    for j in 0..self.c.d {
                        forward[inv[j] as usize] = inv_b[j];
                        backward[inv_b[j] as usize] = inv[j];
                    }
                    self.automorphisms.push(forward);
                    self.automorphisms.push(backward);
                }
            }
            _ => {
                self.best_elem = Some(elem);
                self.changes_at_best = self.changes;
            }
        }
    }

    fn descend(&mut self, first: u32, count: u32, depth: usize) {
        // Siblings with a larger label at this depth can never win.
        let nodes = &self.c.nodes[first as usize..(first + count) as usize];
        let least = nodes.iter().map(|n| self.label(self.p[n.value as usize])).min().unwrap_or(UNSET);
        if depth < self.valid && least > self.best[depth] {
            return;
        }
        for k in first..first + count {
            let node = self.c.nodes[k as usize];
            if self.label(self.p[node.value as usize]) != least {
                continue;
            }
            self.path.push(node.value);
            if self.covered() {
                self.path.pop();
                continue;
            }
            let mark = self.trail.len();
            if self.step(depth, self.p[node.value as usize]) {
                if node.leaf != u32::MAX {
                    self.scan(node.leaf as usize, depth + 1);
                } else {
                    self.descend(node.first_child, node.child_count, depth + 1);
                }
            }
            self.undo(mark);
            self.path.pop();
        }
    }
}

impl Canonicalizer {
    pub fn new(action: &FormAction) -> Self {
        let d = action.table.first().map_or(0, |t| t.len());
        let mut inverses: Vec<Vec<u16>> = action
            .table
            .iter()
            .map(|t| {
                let mut inv = vec![0u16; d];
                for (i, &j) in t.iter().enumerate() {
                    inv[j] = i as u16;
                }
                inv
            })
            .collect();
        inverses.sort();
        inverses.dedup();
        let forward: Vec<Vec<u16>> = inverses
            .iter()
            .map(|inv| {
                let mut f = vec![0u16; d];
                for (j, &x) in inv.iter().enumerate() {
                    f[x as usize] = j as u16;
                }
                f
            })
            .collect();
        let mut meet = vec![u16::MAX; d * d];
        for f in &forward {
            for x in 0..d {
                for y in x + 1..d {
                    let m = f[x].max(f[y]);
                    if m < meet[x * d + y] {
                        meet[x * d + y] = m;
                        meet[y * d + x] = m;
                    }
                }
            }
        }
        let mut starts = vec![0u32; d * d + 1];
        for inv in &inverses {
            for (j, &y) in inv.iter().enumerate() {
                starts[j * d + y as usize + 1] += 1;
            }
        }
        for k in 1..starts.len() {
            starts[k] += starts[k - 1];
        }
        let mut by_position = vec![0u32; inverses.len() * d];
        let mut fill = starts.clone();
        for (e, inv) in inverses.iter().enumerate() {
            for (j, &y) in inv.iter().enumerate() {
                let slot = &mut fill[j * d + y as usize];
                by_position[*slot as usize] = e as u32;
                *slot += 1;
            }
        }
        let mut c = Canonicalizer {
            d,
            inverses,
            forward,
            meet,
            by_position,
            starts,
            nodes: Vec::new(),
            root: (0, 0),
            trie_depth: 0,
        };
        if d > 0 {
            c.root = c.build(0, c.inverses.len(), 0);
        }
        c
    }

    /// Number of distinct form permutations.
    pub fn group_len(&self) -> usize {
        self.inverses.len()
    }

    fn build(&mut self, lo: usize, hi: usize, depth: usize) -> (u32, u32) {
        let mut groups = Vec::new();
        let mut start = lo;
        for i in lo + 1..=hi {
            if i == hi || self.inverses[i][depth] != self.inverses[start][depth] {
                groups.push((start, i));
                start = i;
            }
        }
        let first = self.nodes.len() as u32;
        for &(s, _) in &groups {
            self.nodes.push(Node {
                value: self.inverses[s][depth],
                first_child: 0,
                child_count: 0,
                leaf: u32::MAX,
            });
        }
        for (k, &(s, e)) in groups.iter().enumerate() {
            let idx = first as usize + k;
            if e - s == 1 || depth + 1 == self.d {
                self.nodes[idx].leaf = s as u32;
                self.trie_depth = self.trie_depth.max(depth + 1);
            } else {
                let (fc, cc) = self.build(s, e, depth + 1);
                self.nodes[idx].first_child = fc;
                self.nodes[idx].child_count = cc;
            }
        }
        (first, groups.len() as u32)
    }

    pub fn canonical(&self, b: &BlockSystem) -> CanonicalKey {
        self.canonical_with_automorphisms(b).0
    }

    /// The canonical key together with some form permutations of the group
    /// that map every block of `b` onto a block. They are found as a side
    /// effect of the search and need not generate the whole stabilizer.
    pub fn canonical_with_automorphisms(&self, b: &BlockSystem) -> (CanonicalKey, Vec<Vec<u16>>) {
        assert_eq!(b.len(), self.d, "block system length must match the action");
        if self.d == 0 {
            return (b.clone(), Vec::new());
        }
        if let Some(r) = self.first_repeat(b).filter(|&r| r >= self.trie_depth) {
            return self.from_first_repeat(b, r);
        }
        let mut s = Search {
            c: self,
            p: b.labels(),
            map: vec![UNSET; b.block_count()],
            trail: Vec::with_capacity(self.d),
            next: 0,
            best: vec![0; self.d],
            valid: 0,
            path: Vec::with_capacity(self.d),
            best_elem: None,
            changes: 0,
            changes_at_best: 0,
            automorphisms: Vec::new(),
        };
        s.descend(self.root.0, self.root.1, 0);
        let automorphisms = std::mem::take(&mut s.automorphisms);
        (BlockSystem::from_rgs_unchecked(s.best), automorphisms)
    }

    /// Lex-min search when the first repeat `r` lies beyond the trie. Only
    /// elements that repeat a block at `r` can win, and all of them read
    /// fresh labels before it. The survivors share their image prefix, so
    /// the label an element reads at position `j` is the prefix label at the
    /// first position its block reached, and each position keeps only the
    /// elements reading the least label.
    fn from_first_repeat(&self, b: &BlockSystem, r: usize) -> (CanonicalKey, Vec<Vec<u16>>) {
        let p = b.labels();
        let mut members: Vec<Vec<u16>> = vec![Vec::new(); b.block_count()];
        for (x, &l) in p.iter().enumerate() {
            members[l as usize].push(x as u16);
        }
        let first_position = |e: u32, y: u16| -> usize {
            let f = &self.forward[e as usize];
            members[p[y as usize] as usize].iter().map(|&x| f[x as usize] as usize).min().unwrap_or(usize::MAX)
        };
        // Positions below r are all fresh, so the label at r is the earliest
        // position of the repeated block and only the least one survives.
        let mut alive: Vec<u32> = Vec::new();
        let mut anchor = r;
        for &y in members.iter().filter(|m| m.len() > 1).flatten() {
            let at = r * self.d + y as usize;
            for &e in &self.by_position[self.starts[at] as usize..self.starts[at + 1] as usize] {
                let m = first_position(e, y);
                if m < anchor {
                    anchor = m;
                    alive.clear();
                }
                if m == anchor {
                    alive.push(e);
                }
            }
        }
        alive.sort_unstable();
        // Row i holds the first position of each block under alive[i].
        let k = members.len();
        let mut firsts: Vec<u16> = Vec::with_capacity(alive.len() * k);
        for &e in &alive {
            let f = &self.forward[e as usize];
            firsts.extend(members.iter().map(|m| m.iter().map(|&x| f[x as usize]).min().unwrap_or(u16::MAX)));
        }
        let mut best: Vec<u16> = (0..r as u16).collect();
        best.push(anchor as u16);
        let mut next = r as u16;
        let mut labels: Vec<u16> = Vec::with_capacity(alive.len());
        for j in r + 1..self.d {
            labels.clear();
            labels.extend(alive.iter().enumerate().map(|(i, &e)| {
                let m = firsts[i * k + p[self.inverses[e as usize][j] as usize] as usize] as usize;
                if m < j {
                    best[m]
                } else {
                    next
                }
            }));
            let least = labels.iter().copied().min().expect("some element repeats at r");
            let mut kept = 0;
            for i in 0..alive.len() {
                if labels[i] == least {
                    alive[kept] = alive[i];
                    firsts.copy_within(i * k..(i + 1) * k, kept * k);
                    kept += 1;
                }
            }
            alive.truncate(kept);
            best.push(least);
            if least == next {
                next += 1;
            }
        }
        // Every survivor gives the same image; pairs of them give automorphisms.
        let mut automorphisms = Vec::new();
        let inv_b = &self.inverses[alive[0] as usize];
        for &e in alive[1..].iter().take(MAX_AUTOMORPHISMS / 2) {
            let inv = &self.inverses[e as usize];
            let mut forward = vec![0u16; self.d];
            let mut backward = vec![0u16; self.d];
            for j in 0..self.d {
                forward[inv[j] as usize] = inv_b[j];
                backward[inv_b[j] as usize] = inv[j];
            }
            automorphisms.push(forward);
            automorphisms.push(backward);
        }
        (BlockSystem::from_rgs_unchecked(best), automorphisms)
    }

    /// The earliest position at which some image of `b` reads a block for
    /// the second time, or `None` for the discrete system.
    fn first_repeat(&self, b: &BlockSystem) -> Option<usize> {
        let mut first_member = vec![u16::MAX; b.block_count()];
        let mut best = None;
        for (x, &l) in b.labels().iter().enumerate() {
            let first = first_member[l as usize];
            if first == u16::MAX {
                first_member[l as usize] = x as u16;
                continue;
            }
            // Compare with every earlier member of the same block.
            for (w, &lw) in b.labels()[..x].iter().enumerate() {
                if lw == l {
                    let m = self.meet[w * self.d + x] as usize;
                    best = Some(best.map_or(m, |b: usize| b.min(m)));
                }
            }
        }
        best
    }

    /// Image of `b` under the `k`-th distinct form permutation.
    pub fn image(&self, k: usize, b: &BlockSystem) -> BlockSystem {
        let inv = &self.inverses[k];
        let raw: Vec<u16> = (0..self.d).map(|j| b.labels()[inv[j] as usize]).collect();
        BlockSystem::from_labels(&raw)
    }
}

/// Lexicographically least image of `b` over the group.
pub fn canonical_partition(action: &FormAction, b: &BlockSystem) -> CanonicalKey {
    Canonicalizer::new(action).canonical(b)
}

/// Least residue vector `g(coords) mod n` over the group.
pub fn canonical_vector(action: &FormAction, c: &WeightConfig, n: i64, coords: &[i64]) -> Vec<i64> {
    debug_assert_eq!(coords.len(), c.r);
    action
        .elements
        .iter()
        .map(|g| g.apply_mod(coords, n))
        .min()
        .unwrap_or_else(|| coords.iter().map(|x| x.rem_euclid(n)).collect())
}

#[cfg(test)]
mod tests;
