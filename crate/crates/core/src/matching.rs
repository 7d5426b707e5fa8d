//! Maximum-weight perfect matching in general graphs.
//!
//! The solver is Edmonds' primal-dual blossom method in the O(n^3) form
//! described by Galil, following the structure of Joris van Rantwijk's
//! reference implementation. It runs in maximum-cardinality mode, so the
//! result is a maximum-weight matching among those of maximum cardinality;
//! the instance has a perfect matching exactly when that result is perfect.
//!
//! Weights are integers. Vertex duals start at the largest weight and every
//! slack between two S-vertices stays even, so all dual updates are integral.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NIL: usize = usize::MAX;

/// Undirected weighted simple graph on nodes `0..node_count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingGraph {
    node_count: usize,
    edges: Vec<(usize, usize, i64)>,
}

impl MatchingGraph {
    /// Loops are rejected. Parallel edges collapse to the heaviest copy, and the
    /// surviving edges keep the order of their first appearance.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut out: Vec<(usize, usize, i64)> = Vec::new();
        for (k, (u, v, w)) in edges.into_iter().enumerate() {
            for e in [u, v] {
                if e >= node_count {
                    return Err(Error::BadEndpoint {
                        edge: k,
                        endpoint: e,
                        n: node_count,
                    });
                }
            }
            if u == v {
                return Err(Error::Precondition(format!(
                    "matching graph edge {k} is a loop"
                )));
            }
            let key = (u.min(v), u.max(v));
            match index.get(&key) {
                Some(&i) => out[i].2 = out[i].2.max(w),
                None => {
                    index.insert(key, out.len());
                    out.push((key.0, key.1, w));
                }
            }
        }
        Ok(MatchingGraph {
            node_count,
            edges: out,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize, i64)] {
        &self.edges
    }

    pub fn weight_of(&self, u: usize, v: usize) -> Option<i64> {
        let key = (u.min(v), u.max(v));
        self.edges
            .iter()
            .find(|&&(a, b, _)| (a, b) == key)
            .map(|&(_, _, w)| w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    /// Pairs `(u, v)` with `u < v`, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub weight: i64,
    /// Set when the dual solution passed the complementary slackness check.
    pub certified: bool,
}

impl Matching {
    /// `mate[v]` for every node, `None` when uncovered.
    pub fn mates(&self, node_count: usize) -> Vec<Option<usize>> {
        let mut mate = vec![None; node_count];
        for &(u, v) in &self.pairs {
            mate[u] = Some(v);
            mate[v] = Some(u);
        }
        mate
    }

    pub fn is_perfect(&self, node_count: usize) -> bool {
        2 * self.pairs.len() == node_count
    }

    /// Pairs are edges of `g`, pairwise disjoint, and the weight adds up.
    pub fn is_valid_for(&self, g: &MatchingGraph) -> bool {
        let mut seen = vec![false; g.node_count()];
        let mut total = 0i64;
        for &(u, v) in &self.pairs {
            if u >= g.node_count() || v >= g.node_count() || seen[u] || seen[v] || u == v {
                return false;
            }
            seen[u] = true;
            seen[v] = true;
            match g.weight_of(u, v) {
                Some(w) => total += w,
                None => return false,
            }
        }
        total == self.weight
    }
}

/// Maximum-weight perfect matching, or `None` if the graph has no perfect matching.
pub fn max_weight_perfect_matching(g: &MatchingGraph) -> Option<Matching> {
    if g.node_count % 2 == 1 {
        return None;
    }
    if g.node_count == 0 {
        return Some(Matching {
            pairs: vec![],
            weight: 0,
            certified: true,
        });
    }
    let mut solver = Blossom::new(g);
    solver.run();
    let mate = solver.mate_nodes();
    if mate.contains(&NIL) {
        return None;
    }
    let certified = solver.verify_optimum();
    debug_assert!(certified, "dual certificate failed");
    let mut pairs = Vec::with_capacity(g.node_count / 2);
    let mut weight = 0;
    for (u, &v) in mate.iter().enumerate() {
        if u < v {
            pairs.push((u, v));
            weight += g.edges[solver.mate[u] / 2].2;
        }
    }
    Some(Matching {
        pairs,
        weight,
        certified,
    })
}

/// Node cap for [`brute_force_perfect_matching`].
pub const BRUTE_FORCE_NODE_CAP: usize = 12;

/// Exhaustive optimum over all perfect matchings. Ties go to the first
/// matching found when the lowest uncovered node is paired with partners in
/// ascending order.
pub fn brute_force_perfect_matching(g: &MatchingGraph) -> Result<Option<Matching>> {
    let n = g.node_count();
    if n > BRUTE_FORCE_NODE_CAP {
        return Err(Error::BudgetExceeded {
            needed: n as u128,
            budget: BRUTE_FORCE_NODE_CAP as u64,
        });
    }
    if n % 2 == 1 {
        return Ok(None);
    }
    let mut adj = vec![vec![None; n]; n];
    for &(u, v, w) in g.edges() {
        adj[u][v] = Some(w);
        adj[v][u] = Some(w);
    }

    fn rec(
        adj: &[Vec<Option<i64>>],
        used: &mut [bool],
        cur: &mut Vec<(usize, usize)>,
        acc: i64,
        best: &mut Option<(i64, Vec<(usize, usize)>)>,
    ) {
        let Some(u) = used.iter().position(|&b| !b) else {
            if best.as_ref().is_none_or(|(bw, _)| acc > *bw) {
                *best = Some((acc, cur.clone()));
            }
            return;
        };
        used[u] = true;
        for v in u + 1..used.len() {
            if used[v] {
                continue;
            }
            if let Some(w) = adj[u][v] {
                used[v] = true;
                cur.push((u, v));
                rec(adj, used, cur, acc + w, best);
                cur.pop();
                used[v] = false;
            }
        }
        used[u] = false;
    }

    let mut best = None;
    rec(&adj, &mut vec![false; n], &mut Vec::new(), 0, &mut best);
    Ok(best.map(|(weight, mut pairs)| {
        pairs.sort_unstable();
        Matching {
            pairs,
            weight,
            certified: false,
        }
    }))
}

struct Blossom {
    nvertex: usize,
    edges: Vec<(usize, usize, i64)>,
    /// `endpoint[p]` is the vertex at end `p`; edge `k` has ends `2k` and `2k + 1`.
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    /// Remote endpoint of the matched edge, or NIL.
    mate: Vec<usize>,
    label: Vec<i8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
}

impl Blossom {
    fn new(g: &MatchingGraph) -> Self {
        let nvertex = g.node_count;
        let edges = g.edges.clone();
        let nedge = edges.len();
        let maxweight = edges.iter().map(|e| e.2).max().unwrap_or(0).max(0);
        let mut endpoint = Vec::with_capacity(2 * nedge);
        let mut neighbend = vec![Vec::new(); nvertex];
        for (k, &(i, j, _)) in edges.iter().enumerate() {
            endpoint.push(i);
            endpoint.push(j);
            neighbend[i].push(2 * k + 1);
            neighbend[j].push(2 * k);
        }
        let mut dualvar = vec![maxweight; nvertex];
        dualvar.extend(std::iter::repeat_n(0, nvertex));
        let mut blossombase: Vec<usize> = (0..nvertex).collect();
        blossombase.extend(std::iter::repeat_n(NIL, nvertex));
        Blossom {
            nvertex,
            edges,
            endpoint,
            neighbend,
            mate: vec![NIL; nvertex],
            label: vec![0; 2 * nvertex],
            labelend: vec![NIL; 2 * nvertex],
            inblossom: (0..nvertex).collect(),
            blossomparent: vec![NIL; 2 * nvertex],
            blossomchilds: vec![Vec::new(); 2 * nvertex],
            blossombase,
            blossomendps: vec![Vec::new(); 2 * nvertex],
            bestedge: vec![NIL; 2 * nvertex],
            blossombestedges: vec![None; 2 * nvertex],
            unusedblossoms: (nvertex..2 * nvertex).collect(),
            dualvar,
            allowedge: vec![false; nedge],
            queue: Vec::new(),
        }
    }

    fn slack(&self, k: usize) -> i64 {
        let (i, j, wt) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * wt
    }

    fn blossom_leaves(&self, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![b];
        while let Some(t) = stack.pop() {
            if t < self.nvertex {
                out.push(t);
            } else {
                stack.extend(self.blossomchilds[t].iter().rev().copied());
            }
        }
        out
    }

    fn assign_label(&mut self, w: usize, t: i8, p: usize) {
        let mut w = w;
        let mut t = t;
        let mut p = p;
        loop {
            let b = self.inblossom[w];
            debug_assert!(self.label[w] == 0 && self.label[b] == 0);
            self.label[w] = t;
            self.label[b] = t;
            self.labelend[w] = p;
            self.labelend[b] = p;
            self.bestedge[w] = NIL;
            self.bestedge[b] = NIL;
            if t == 1 {
                let leaves = self.blossom_leaves(b);
                self.queue.extend(leaves);
                return;
            }
            // t == 2: label the mate of the base S
            let base = self.blossombase[b];
            let m = self.mate[base];
            debug_assert!(m != NIL);
            w = self.endpoint[m];
            t = 1;
            p = m ^ 1;
        }
    }

    /// Trace back from `v` and `w` to find a new blossom base or an augmenting path.
    fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NIL;
        let (mut v, mut w) = (v, w);
        while v != NIL || w != NIL {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            debug_assert_eq!(self.label[b], 1);
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NIL {
                v = NIL;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                debug_assert_eq!(self.label[b], 2);
                v = self.endpoint[self.labelend[b]];
            }
            if w != NIL {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("free blossom slot");
        self.blossombase[b] = base;
        self.blossomparent[b] = NIL;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        debug_assert_eq!(self.label[bb], 1);
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for leaf in self.blossom_leaves(b) {
            if self.label[self.inblossom[leaf]] == 2 {
                self.queue.push(leaf);
            }
            self.inblossom[leaf] = b;
        }

        let mut bestedgeto = vec![NIL; 2 * self.nvertex];
        for &sub in &path {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[sub].take() {
                Some(list) => vec![list],
                None => self
                    .blossom_leaves(sub)
                    .into_iter()
                    .map(|leaf| self.neighbend[leaf].iter().map(|p| p / 2).collect())
                    .collect(),
            };
            for nblist in nblists {
                for k in nblist {
                    let (mut i, mut j, _) = self.edges[k];
                    if self.inblossom[j] == b {
                        std::mem::swap(&mut i, &mut j);
                    }
                    let _ = i;
                    let bj = self.inblossom[j];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NIL || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.bestedge[sub] = NIL;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NIL).collect();
        self.bestedge[b] = NIL;
        for &k in &list {
            if self.bestedge[b] == NIL || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
        self.blossombestedges[b] = Some(list);
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NIL;
            if s < self.nvertex {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for leaf in self.blossom_leaves(s) {
                    self.inblossom[leaf] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            // Relabel the even-length path from the entry child to the base.
            let len = childs.len() as isize;
            let at = |j: isize| -> usize { childs[j.rem_euclid(len) as usize] };
            let endps = self.blossomendps[b].clone();
            let endp_at = |j: isize| -> usize { endps[j.rem_euclid(len) as usize] };
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs.iter().position(|&c| c == entrychild).unwrap() as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 == 1 {
                j -= len;
                (1, 0)
            } else {
                (-1, 1)
            };
            let mut p = self.labelend[b];
            while j != 0 {
                let q = self.endpoint[p ^ 1];
                self.label[q] = 0;
                let r = self.endpoint[endp_at(j - endptrick as isize) ^ endptrick ^ 1];
                self.label[r] = 0;
                self.assign_label(q, 2, p);
                self.allowedge[endp_at(j - endptrick as isize) / 2] = true;
                j += jstep;
                p = endp_at(j - endptrick as isize) ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = at(j);
            let q = self.endpoint[p ^ 1];
            self.label[q] = 2;
            self.label[bv] = 2;
            self.labelend[q] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NIL;
            j += jstep;
            while at(j) != entrychild {
                let bv = at(j);
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let labelled = self
                    .blossom_leaves(bv)
                    .into_iter()
                    .find(|&leaf| self.label[leaf] != 0);
                if let Some(v) = labelled {
                    debug_assert_eq!(self.label[v], 2);
                    debug_assert_eq!(self.inblossom[v], bv);
                    self.label[v] = 0;
                    let m = self.endpoint[self.mate[self.blossombase[bv]]];
                    self.label[m] = 0;
                    let le = self.labelend[v];
                    self.assign_label(v, 2, le);
                }
                j += jstep;
            }
        }
        self.label[b] = -1;
        self.labelend[b] = NIL;
        self.blossomchilds[b] = Vec::new();
        self.blossomendps[b] = Vec::new();
        self.blossombase[b] = NIL;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NIL;
        self.unusedblossoms.push(b);
    }

    /// Swap matched and unmatched edges along the path from `v` to the base of `b`.
    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nvertex {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len() as isize;
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let mut j = i as isize;
        let (jstep, endptrick): (isize, usize) = if i & 1 == 1 {
            j -= len;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][j.rem_euclid(len) as usize];
            let p =
                self.blossomendps[b][(j - endptrick as isize).rem_euclid(len) as usize] ^ endptrick;
            if t >= self.nvertex {
                let e = self.endpoint[p];
                self.augment_blossom(t, e);
            }
            j += jstep;
            let t = self.blossomchilds[b][j.rem_euclid(len) as usize];
            if t >= self.nvertex {
                let e = self.endpoint[p ^ 1];
                self.augment_blossom(t, e);
            }
            let (a, c) = (self.endpoint[p], self.endpoint[p ^ 1]);
            self.mate[a] = p ^ 1;
            self.mate[c] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
        debug_assert_eq!(self.blossombase[b], v);
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (s0, p0) in [(v, 2 * k + 1), (w, 2 * k)] {
            let (mut s, mut p) = (s0, p0);
            loop {
                let bs = self.inblossom[s];
                debug_assert_eq!(self.label[bs], 1);
                if bs >= self.nvertex {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NIL {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                debug_assert_eq!(self.label[bt], 2);
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                debug_assert_eq!(self.blossombase[bt], t);
                if bt >= self.nvertex {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn run(&mut self) {
        let n = self.nvertex;
        for _stage in 0..n {
            self.label.iter_mut().for_each(|l| *l = 0);
            self.bestedge.iter_mut().for_each(|e| *e = NIL);
            for b in n..2 * n {
                self.blossombestedges[b] = None;
            }
            self.allowedge.iter_mut().for_each(|a| *a = false);
            self.queue.clear();
            for v in 0..n {
                if self.mate[v] == NIL && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NIL);
                }
            }

            let mut augmented = false;
            loop {
                while let Some(v) = (!augmented).then(|| self.queue.pop()).flatten() {
                    debug_assert_eq!(self.label[self.inblossom[v]], 1);
                    let ends = self.neighbend[v].clone();
                    for p in ends {
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NIL {
                                    self.add_blossom(base, k);
                                } else {
                                    self.augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                debug_assert_eq!(self.label[self.inblossom[w]], 2);
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NIL || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NIL || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }
                if augmented {
                    break;
                }

                // Dual adjustment. Maximum-cardinality mode: no delta type 1 unless stuck.
                let mut deltatype = 0u8;
                let mut delta = 0i64;
                let mut deltaedge = NIL;
                let mut deltablossom = NIL;
                for v in 0..n {
                    if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != NIL {
                        let d = self.slack(self.bestedge[v]);
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 2;
                            deltaedge = self.bestedge[v];
                        }
                    }
                }
                for b in 0..2 * n {
                    if self.blossomparent[b] == NIL && self.label[b] == 1 && self.bestedge[b] != NIL
                    {
                        let kslack = self.slack(self.bestedge[b]);
                        debug_assert_eq!(kslack % 2, 0);
                        let d = kslack / 2;
                        if deltatype == 0 || d < delta {
                            delta = d;
                            deltatype = 3;
                            deltaedge = self.bestedge[b];
                        }
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NIL
                        && self.blossomparent[b] == NIL
                        && self.label[b] == 2
                        && (deltatype == 0 || self.dualvar[b] < delta)
                    {
                        delta = self.dualvar[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if deltatype == 0 {
                    // No further improvement possible; optimum reached.
                    deltatype = 1;
                    delta = self.dualvar[..n].iter().copied().min().unwrap_or(0).max(0);
                }

                for v in 0..n {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for b in n..2 * n {
                    if self.blossombase[b] != NIL && self.blossomparent[b] == NIL {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }

                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, mut j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            std::mem::swap(&mut i, &mut j);
                        }
                        let _ = j;
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        debug_assert_eq!(self.label[self.inblossom[i]], 1);
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }

            if !augmented {
                break;
            }
            for b in n..2 * n {
                if self.blossomparent[b] == NIL
                    && self.blossombase[b] != NIL
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }

    fn mate_nodes(&self) -> Vec<usize> {
        self.mate
            .iter()
            .map(|&p| if p == NIL { NIL } else { self.endpoint[p] })
            .collect()
    }

    /// Complementary slackness for the perfect matching LP: every edge has
    /// nonnegative reduced cost, matched edges are tight, blossom duals are
    /// nonnegative, and every blossom with positive dual is full.
    fn verify_optimum(&self) -> bool {
        let n = self.nvertex;
        if self.dualvar[n..].iter().any(|&d| d < 0) {
            return false;
        }
        for (k, &(i, j, wt)) in self.edges.iter().enumerate() {
            let mut s = self.dualvar[i] + self.dualvar[j] - 2 * wt;
            let chain = |mut b: usize| {
                let mut c = vec![b];
                while self.blossomparent[b] != NIL {
                    b = self.blossomparent[b];
                    c.push(b);
                }
                c.reverse();
                c
            };
            let (ib, jb) = (chain(i), chain(j));
            for (bi, bj) in ib.iter().zip(&jb) {
                if bi != bj {
                    break;
                }
                s += 2 * self.dualvar[*bi];
            }
            if s < 0 {
                return false;
            }
            let mi = self.mate[i] != NIL && self.mate[i] / 2 == k;
            let mj = self.mate[j] != NIL && self.mate[j] / 2 == k;
            if (mi || mj) && !(mi && mj && s == 0) {
                return false;
            }
        }
        for b in n..2 * n {
            if self.blossombase[b] != NIL && self.dualvar[b] > 0 {
                let endps = &self.blossomendps[b];
                if endps.len() % 2 != 1 {
                    return false;
                }
                for &p in endps.iter().skip(1).step_by(2) {
                    if self.mate[self.endpoint[p]] != p ^ 1 || self.mate[self.endpoint[p ^ 1]] != p
                    {
                        return false;
                    }
                }
            }
        }
        true
    }
}
