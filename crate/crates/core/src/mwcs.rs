//! Maximum-weight connected subgraph search.
//!
//! Branch and bound over connected vertex sets grown from a root. Every
//! search node is a connected set `S` plus a set of forbidden vertices; it
//! branches on including or forbidding one frontier vertex. Positive frontier
//! vertices are absorbed without branching, nonpositive leaves are deleted
//! up front, and a node is pruned when `score(S)` plus the reachable positive
//! mass (per frontier component, minus the cheapest entry) cannot beat the
//! incumbent.
//!
//! The anchored variant contracts the anchor set `R` into a zero-score root:
//! anchors never enter the objective, so any optimal solution can be taken
//! to contain all of `R`.

use std::time::{Duration, Instant};

use crate::bum::ScoreVector;
use crate::error::{Error, Result};
use crate::graph::{is_connected, Graph, Vertex, VertexSet};

/// Default number of search nodes per solve.
pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000;

/// Limits on one solve. Node counts make runs reproducible; the optional
/// wall-clock limit may additionally cut a search short.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            time_limit: None,
        }
    }

    pub fn unlimited() -> Self {
        Self::nodes(u64::MAX)
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self::nodes(DEFAULT_NODE_BUDGET)
    }
}

/// An MWCS instance with optional anchor set `R` and candidate set `C`.
#[derive(Clone, Debug)]
pub struct MwcsInstance<'a> {
    pub graph: &'a Graph,
    pub scores: &'a ScoreVector,
    pub anchors: VertexSet,
    pub candidates: VertexSet,
    /// Solutions may only use vertices of `R ∪ C`.
    pub restrict_to_union: bool,
    pub budget: SearchBudget,
}

impl<'a> MwcsInstance<'a> {
    /// Plain instance: no anchors, every vertex a candidate.
    pub fn new(graph: &'a Graph, scores: &'a ScoreVector) -> Self {
        MwcsInstance {
            graph,
            scores,
            anchors: graph.empty_set(),
            candidates: graph.full_set(),
            restrict_to_union: true,
            budget: SearchBudget::default(),
        }
    }

    pub fn with_anchors(mut self, anchors: VertexSet) -> Self {
        self.anchors = anchors;
        self
    }

    pub fn with_candidates(mut self, candidates: VertexSet) -> Self {
        self.candidates = candidates;
        self
    }

    pub fn with_budget(mut self, budget: SearchBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn restrict_to_union(mut self, restrict: bool) -> Self {
        self.restrict_to_union = restrict;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.graph.vertex_count();
        if self.scores.len() != n {
            return Err(Error::invalid(format!("{} scores for {n} vertices", self.scores.len())));
        }
        if self.anchors.universe() != n || self.candidates.universe() != n {
            return Err(Error::invalid("anchor or candidate set does not match the graph"));
        }
        if !self.anchors.is_disjoint(&self.candidates) {
            return Err(Error::invalid("anchor and candidate sets overlap"));
        }
        if self.candidates.is_empty() {
            return Err(Error::invalid("candidate set is empty"));
        }
        if !is_connected(self.graph, &self.anchors) {
            return Err(Error::invalid("anchor set is not connected"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MwcsSolution {
    /// Connected solution set, anchors included.
    pub vertices: VertexSet,
    /// The candidate part `vertices ∩ C`.
    pub chosen: VertexSet,
    /// Objective value; anchors contribute nothing.
    pub total_score: f64,
    pub proven_optimal: bool,
    /// Search nodes expanded.
    pub nodes: u64,
}

/// Unanchored MWCS: a nonempty connected set maximizing the total score.
/// Only candidates (all vertices by default) are scored and, with
/// `restrict_to_union`, eligible.
pub fn solve(inst: &MwcsInstance<'_>) -> Result<MwcsSolution> {
    inst.validate()?;
    if !inst.anchors.is_empty() {
        return Err(Error::invalid("plain MWCS takes no anchors; use solve_constrained"));
    }
    Problem::build(inst, false)?.run(inst)
}

/// Anchored MWCS used by ranking refinement: the solution must touch `R`
/// (when nonempty) and contain at least one but not all of `C`. A single
/// candidate is returned as is.
pub fn solve_constrained(inst: &MwcsInstance<'_>) -> Result<MwcsSolution> {
    inst.validate()?;
    if inst.candidates.len() == 1 {
        let c = inst.candidates.first().expect("one candidate");
        return Ok(MwcsSolution {
            vertices: inst.anchors.union(&inst.candidates),
            chosen: inst.candidates.clone(),
            total_score: inst.scores.get(c),
            proven_optimal: true,
            nodes: 0,
        });
    }
    Problem::build(inst, true)?.run(inst)
}

/// Instance translated to compact local ids. Non-root local ids follow
/// global order, so comparing local id lists compares global ones.
struct Problem {
    global: Vec<Vertex>,
    anchors: Vec<Vertex>,
    root: Option<u32>,
    adj: Vec<Vec<u32>>,
    score: Vec<f64>,
    is_cand: Vec<bool>,
    absorbable: Vec<bool>,
    /// Outside the root's component, or deleted by preprocessing.
    removed: Vec<bool>,
    cand_total: usize,
    not_all: bool,
    has_outside: bool,
}

impl Problem {
    fn build(inst: &MwcsInstance<'_>, not_all: bool) -> Result<Self> {
        let g = inst.graph;
        let n = g.vertex_count();
        let allowed = |v: Vertex| {
            !inst.anchors.contains(v) && (!inst.restrict_to_union || inst.candidates.contains(v))
        };
        let global: Vec<Vertex> = (0..n).filter(|&v| allowed(v)).collect();
        let mut local_of = vec![u32::MAX; n];
        for (i, &v) in global.iter().enumerate() {
            local_of[v] = i as u32;
        }
        let rooted = !inst.anchors.is_empty();
        let size = global.len() + rooted as usize;
        let root = rooted.then_some(global.len() as u32);
        let mut adj = vec![Vec::new(); size];
        for (i, &v) in global.iter().enumerate() {
            for &w in g.neighbors(v) {
                if local_of[w] != u32::MAX {
                    adj[i].push(local_of[w]);
                } else if let (Some(r), true) = (root, inst.anchors.contains(w)) {
                    adj[i].push(r);
                    adj[r as usize].push(i as u32);
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let mut score: Vec<f64> = global.iter().map(|&v| inst.scores.get(v)).collect();
        let mut is_cand: Vec<bool> = global.iter().map(|&v| inst.candidates.contains(v)).collect();
        if rooted {
            score.push(0.0);
            is_cand.push(false);
        }
        let has_outside = is_cand.iter().take(global.len()).any(|c| !c);
        let absorbable = (0..size)
            .map(|i| !not_all || inst.restrict_to_union || !is_cand[i])
            .collect();

        let mut removed = vec![false; size];
        if let Some(r) = root {
            let reached = reachable(&adj, r, &removed);
            for (flag, hit) in removed.iter_mut().zip(&reached) {
                *flag = !hit;
            }
            if !(0..global.len()).any(|i| is_cand[i] && !removed[i]) {
                return Err(Error::Infeasible(
                    "no candidate vertex can be connected to the anchor set".into(),
                ));
            }
        }
        Ok(Problem {
            global,
            anchors: inst.anchors.to_vec(),
            root,
            adj,
            score,
            is_cand,
            absorbable,
            removed,
            cand_total: inst.candidates.len(),
            not_all,
            has_outside,
        })
    }

    /// Sorted global ids of a solution, anchors included.
    fn full_set(&self, members: &[u32]) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = members.iter().map(|&i| self.global[i as usize]).collect();
        out.extend_from_slice(&self.anchors);
        out.sort_unstable();
        out
    }

    fn feasible(&self, cand_count: usize) -> bool {
        cand_count >= 1 && (!self.not_all || cand_count < self.cand_total)
    }

    /// Solutions that must be evaluated before preprocessing: singletons
    /// (covering every optimum made of nonpositive vertices) and, under
    /// "not all of C" in restricted mode, the sets `C \ {u}` that absorbing
    /// the positive vertex `u` would otherwise hide.
    fn prechecks(&self, restricted: bool) -> Vec<(f64, Vec<u32>)> {
        let mut out = Vec::new();
        let m = self.global.len();
        for c in 0..m {
            let attached = match self.root {
                Some(r) => self.adj[c].contains(&r),
                None => true,
            };
            if self.is_cand[c] && !self.removed[c] && attached && self.feasible(1) {
                out.push((self.score[c], vec![c as u32]));
            }
        }
        let live: Vec<u32> = (0..m as u32).filter(|&i| !self.removed[i as usize]).collect();
        let all_present = live.iter().filter(|&&i| self.is_cand[i as usize]).count() == self.cand_total;
        if !(self.not_all && restricted && all_present) {
            return out;
        }
        let total: f64 = live.iter().map(|&i| self.score[i as usize]).sum();
        let cut = cut_vertices(&self.adj, &self.removed);
        for &u in &live {
            if cut[u as usize] {
                continue;
            }
            let rest: Vec<u32> = live.iter().copied().filter(|&i| i != u).collect();
            out.push((total - self.score[u as usize], rest));
        }
        out
    }

    fn delete_negative_leaves(&mut self) {
        let size = self.adj.len();
        let removable = |p: &Problem, i: usize| {
            Some(i as u32) != p.root && p.score[i] < 0.0 && (!p.is_cand[i] || !p.has_outside)
        };
        let mut degree: Vec<usize> = (0..size)
            .map(|i| self.adj[i].iter().filter(|&&w| !self.removed[w as usize]).count())
            .collect();
        let mut stack: Vec<usize> = (0..size)
            .filter(|&i| !self.removed[i] && degree[i] <= 1 && removable(self, i))
            .collect();
        while let Some(i) = stack.pop() {
            if self.removed[i] {
                continue;
            }
            self.removed[i] = true;
            for k in 0..self.adj[i].len() {
                let w = self.adj[i][k] as usize;
                if !self.removed[w] {
                    degree[w] -= 1;
                    if degree[w] <= 1 && removable(self, w) {
                        stack.push(w);
                    }
                }
            }
        }
    }

    fn run(mut self, inst: &MwcsInstance<'_>) -> Result<MwcsSolution> {
        let prechecked = self.prechecks(inst.restrict_to_union);
        self.delete_negative_leaves();

        let mut search = Search::new(&self, inst.budget);
        for (score, members) in &prechecked {
            search.offer(*score, members);
        }
        match self.root {
            Some(r) => {
                search.push(r);
                search.node();
            }
            None => {
                let mut seeds: Vec<u32> = (0..self.global.len() as u32)
                    .filter(|&i| !self.removed[i as usize] && self.score[i as usize] > 0.0)
                    .collect();
                seeds.sort_by(|&a, &b| {
                    self.score[b as usize]
                        .total_cmp(&self.score[a as usize])
                        .then(a.cmp(&b))
                });
                // Each seed searches the solutions whose first vertex in seed
                // order is that seed. Optima without a positive vertex are
                // singletons unless zero-score outside vertices can tie with
                // them, so the remaining vertices only matter in that case.
                let mut rest: Vec<u32> = (0..self.global.len() as u32)
                    .filter(|&i| !self.removed[i as usize] && self.score[i as usize] <= 0.0)
                    .collect();
                let mut queue = seeds.into_iter();
                loop {
                    let s = match queue.next() {
                        Some(s) => s,
                        None if self.has_outside
                            && !rest.is_empty()
                            && search.best.as_ref().is_none_or(|b| b.0 <= 0.0) =>
                        {
                            queue = std::mem::take(&mut rest).into_iter();
                            continue;
                        }
                        None => break,
                    };
                    if search.aborted {
                        break;
                    }
                    search.push(s);
                    search.node();
                    search.pop();
                    search.forbidden[s as usize] = true;
                }
            }
        }
        let proven = !search.aborted;
        let nodes = search.nodes;
        let (total_score, members) = search
            .best
            .take()
            .ok_or_else(|| Error::Infeasible("no feasible connected set".into()))?;

        let n = inst.graph.vertex_count();
        let mut vertices = inst.anchors.clone();
        let mut chosen = VertexSet::new(n);
        for &i in &members {
            let v = self.global[i as usize];
            vertices.insert(v);
            if self.is_cand[i as usize] {
                chosen.insert(v);
            }
        }
        debug_assert!(is_connected(inst.graph, &vertices));
        Ok(MwcsSolution {
            vertices,
            chosen,
            total_score,
            proven_optimal: proven,
            nodes,
        })
    }
}

struct Search<'p> {
    p: &'p Problem,
    in_s: Vec<bool>,
    members: Vec<u32>,
    s_score: f64,
    s_cands: usize,
    forbidden: Vec<bool>,
    best: Option<(f64, Vec<u32>)>,
    nodes: u64,
    max_nodes: u64,
    deadline: Option<Instant>,
    aborted: bool,
    stamp: u32,
    seen: Vec<u32>,
    frontier_mark: Vec<u32>,
    queue: Vec<u32>,
}

impl<'p> Search<'p> {
    fn new(p: &'p Problem, budget: SearchBudget) -> Self {
        let size = p.adj.len();
        Search {
            p,
            in_s: vec![false; size],
            members: Vec::new(),
            s_score: 0.0,
            s_cands: 0,
            forbidden: vec![false; size],
            best: None,
            nodes: 0,
            max_nodes: budget.max_nodes,
            deadline: budget.time_limit.map(|t| Instant::now() + t),
            aborted: false,
            stamp: 0,
            seen: vec![0; size],
            frontier_mark: vec![0; size],
            queue: Vec::new(),
        }
    }

    fn push(&mut self, v: u32) {
        let i = v as usize;
        debug_assert!(!self.in_s[i]);
        self.in_s[i] = true;
        self.members.push(v);
        self.s_score += self.p.score[i];
        self.s_cands += self.p.is_cand[i] as usize;
    }

    fn pop(&mut self) {
        let v = self.members.pop().expect("nonempty") as usize;
        self.in_s[v] = false;
        self.s_score -= self.p.score[v];
        self.s_cands -= self.p.is_cand[v] as usize;
    }

    fn free(&self, w: usize) -> bool {
        !self.in_s[w] && !self.forbidden[w] && !self.p.removed[w]
    }

    /// Records `members` (sorted local ids, root excluded) if it beats the
    /// incumbent, ties going to the lexicographically smaller full set.
    fn offer(&mut self, score: f64, members: &[u32]) {
        let better = match &self.best {
            None => true,
            Some((best, incumbent)) => {
                score > *best
                    || (score == *best && self.p.full_set(members) < self.p.full_set(incumbent))
            }
        };
        if better {
            self.best = Some((score, members.to_vec()));
        }
    }

    fn offer_current(&mut self) {
        if !self.p.feasible(self.s_cands) {
            return;
        }
        if let Some((best, _)) = &self.best {
            if self.s_score < *best {
                return;
            }
        }
        let mut members: Vec<u32> = self
            .members
            .iter()
            .copied()
            .filter(|&v| Some(v) != self.p.root)
            .collect();
        members.sort_unstable();
        self.offer(self.s_score, &members);
    }

    /// Adds positive frontier vertices until none is left.
    fn absorb(&mut self) {
        let mut scan_from = 0;
        loop {
            let end = self.members.len();
            let mut grabbed = Vec::new();
            for k in scan_from..end {
                let u = self.members[k] as usize;
                for &w in &self.p.adj[u] {
                    let wi = w as usize;
                    if self.free(wi) && self.p.score[wi] > 0.0 && self.p.absorbable[wi] && !grabbed.contains(&w) {
                        grabbed.push(w);
                    }
                }
            }
            if grabbed.is_empty() {
                return;
            }
            for w in grabbed {
                self.push(w);
            }
            scan_from = end;
        }
    }

    /// Upper bound on any feasible extension of the current set, and the
    /// frontier vertex to branch on.
    fn bound_and_branch(&mut self) -> (f64, Option<u32>) {
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.seen.fill(0);
            self.frontier_mark.fill(0);
            self.stamp = 1;
        }
        let stamp = self.stamp;
        let mut frontier = Vec::new();
        for &u in &self.members {
            for &w in &self.p.adj[u as usize] {
                let wi = w as usize;
                if self.free(wi) && self.frontier_mark[wi] != stamp {
                    self.frontier_mark[wi] = stamp;
                    frontier.push(w);
                }
            }
        }

        let mut gain = 0.0;
        let mut cand_positive = false;
        let mut cand_best = f64::NEG_INFINITY;
        let mut branch: Option<(f64, u32)> = None;
        for &f in &frontier {
            if self.seen[f as usize] == stamp {
                continue;
            }
            let mut positive = 0.0;
            let mut entry = (f64::NEG_INFINITY, u32::MAX);
            let mut has_cand = false;
            self.queue.clear();
            self.queue.push(f);
            self.seen[f as usize] = stamp;
            let mut head = 0;
            while head < self.queue.len() {
                let x = self.queue[head] as usize;
                head += 1;
                let s = self.p.score[x];
                positive += s.max(0.0);
                has_cand |= self.p.is_cand[x];
                if self.frontier_mark[x] == stamp && (s > entry.0 || (s == entry.0 && (x as u32) < entry.1)) {
                    entry = (s, x as u32);
                }
                for &w in &self.p.adj[x] {
                    let wi = w as usize;
                    if self.seen[wi] != stamp && self.free(wi) {
                        self.seen[wi] = stamp;
                        self.queue.push(w);
                    }
                }
            }
            let value = positive + entry.0.min(0.0);
            gain += value.max(0.0);
            if has_cand {
                cand_positive |= value > 0.0;
                cand_best = cand_best.max(value);
            }
            if branch.is_none_or(|(v, _)| value > v) {
                branch = Some((value, entry.1));
            }
        }
        let bound = if self.s_cands >= 1 || cand_positive {
            self.s_score + gain
        } else {
            self.s_score + gain + cand_best
        };
        (bound, branch.map(|(_, v)| v))
    }

    fn node(&mut self) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.aborted = true;
            return;
        }
        if self.nodes.is_multiple_of(256) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.aborted = true;
                    return;
                }
            }
        }
        let mark = self.members.len();
        self.absorb();
        self.offer_current();
        let (bound, branch) = self.bound_and_branch();
        let promising = match &self.best {
            None => bound > f64::NEG_INFINITY,
            // Equal bounds are explored so ties resolve to the
            // lexicographically smallest optimum.
            Some((best, _)) => bound >= *best,
        };
        if let (true, Some(u)) = (promising, branch) {
            self.push(u);
            self.node();
            self.pop();
            self.forbidden[u as usize] = true;
            self.node();
            self.forbidden[u as usize] = false;
        }
        while self.members.len() > mark {
            self.pop();
        }
    }
}

/// Vertices reachable from `start` avoiding `blocked`.
fn reachable(adj: &[Vec<u32>], start: u32, blocked: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start as usize] = true;
    while let Some(u) = stack.pop() {
        for &w in &adj[u as usize] {
            if !seen[w as usize] && !blocked[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// Marks every live vertex whose deletion disconnects the live graph (or,
/// for a disconnected live graph, leaves it disconnected).
fn cut_vertices(adj: &[Vec<u32>], removed: &[bool]) -> Vec<bool> {
    let size = adj.len();
    let live: Vec<usize> = (0..size).filter(|&i| !removed[i]).collect();
    let Some(&start) = live.first() else {
        return vec![false; size];
    };
    let all = reachable(adj, start as u32, removed);
    if live.iter().any(|&i| !all[i]) {
        // Disconnected: deleting u helps only if u is an isolated component.
        let mut cut = vec![true; size];
        for &u in &live {
            let mut blocked = removed.to_vec();
            blocked[u] = true;
            if let Some(&other) = live.iter().find(|&&i| i != u) {
                let seen = reachable(adj, other as u32, &blocked);
                cut[u] = live.iter().any(|&i| i != u && !seen[i]);
            } else {
                cut[u] = false;
            }
        }
        return cut;
    }

    // Iterative Tarjan low-link.
    let mut order = vec![u32::MAX; size];
    let mut low = vec![0u32; size];
    let mut cut = vec![false; size];
    let mut counter = 0u32;
    let mut stack: Vec<(usize, usize, usize)> = vec![(start, usize::MAX, 0)];
    order[start] = counter;
    low[start] = counter;
    counter += 1;
    let mut root_children = 0;
    while let Some(&mut (u, parent, ref mut next)) = stack.last_mut() {
        if *next < adj[u].len() {
            let w = adj[u][*next] as usize;
            *next += 1;
            if removed[w] || w == parent {
                continue;
            }
            if order[w] == u32::MAX {
                order[w] = counter;
                low[w] = counter;
                counter += 1;
                if u == start {
                    root_children += 1;
                }
                stack.push((w, u, 0));
            } else {
                low[u] = low[u].min(order[w]);
            }
        } else {
            stack.pop();
            if parent != usize::MAX {
                low[parent] = low[parent].min(low[u]);
                if parent != start && low[u] >= order[parent] {
                    cut[parent] = true;
                }
            }
        }
    }
    cut[start] = root_children > 1;
    cut
}
