//! Labelled resolution dual graphs.
//!
//! The dual graph of a class is a tree shaped as a horizontal spine with an
//! arm hanging at each junction st_j; vertices are labelled in blow-up order
//! and partitioned into stages 1..g+1 (the junction belongs to the smaller
//! stage). The multiplicity of a vertex is the value of the valuation at the
//! corresponding infinitely near point; within stage j, runs of equal
//! multiplicity have lengths equal to the continued-fraction digits of b'_j.
//!
//! Construction simulates the blow-up sequence:
//!   * per-stage multiplicities come from subtractive Euclid — stage 1 on
//!     (bbar_1, bbar_0), stage j >= 2 on (e_{j-1}(b'_j - 1), e_{j-1});
//!   * a free blow-up on divisor A appends a leaf adjacent to A; a satellite
//!     blow-up at the intersection of A and B splits the edge A-B;
//!   * the satellite partner is chosen by residual proximity capacity:
//!     cap(k) = mult(k) minus the multiplicities already proximate to k, and
//!     a new vertex additionally attaches to the unique neighbour of its
//!     predecessor whose capacity admits its multiplicity.
//!
//! Irrational classes have an infinite tail; it is truncated after a
//! caller-chosen number of certified continued-fraction digits, and the tail
//! multiplicities are carried exactly as integer combinations of 1 and the
//! tail constant. Every build ends with an invariant battery (tree shape,
//! degree bound, digit law, free census, proximity equality, vertex counts);
//! a breach aborts with a diagnostic instead of returning a wrong graph.

use crate::class::{contact_data, DiscreteClass};
use crate::error::{Error, Result};
use crate::numeric::{cf_expand, rational_from_int, ExtendedExponent, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::BTreeSet;

const MAX_VERTICES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Dot,
    Ascii,
    Structured,
}

impl RenderFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "dot" => Ok(RenderFormat::Dot),
            "ascii" => Ok(RenderFormat::Ascii),
            "text" | "structured" => Ok(RenderFormat::Structured),
            other => Err(Error::Parse(format!("unknown render format {other:?}"))),
        }
    }
}

/// Construction diagnostics. The capacity tie-break is not expected to fire;
/// it is counted so any occurrence is visible.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub tie_breaks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualGraph {
    g: usize,
    truncated: bool,
    /// Tree edges as (a, b) with a < b, sorted.
    edges: Vec<(u32, u32)>,
    /// Stage of each vertex (index = label - 1); junctions carry the smaller
    /// of their two stages.
    stage: Vec<u32>,
    /// Exact multiplicities; integers for divisorial classes, affine in the
    /// tail constant for truncated irrational tails.
    mult: Vec<ExtendedExponent>,
    free: Vec<bool>,
    /// st_1..st_g.
    st: Vec<u32>,
    /// l_1..l_{g+1}; the final entry is omitted for truncated graphs.
    ell: Vec<u32>,
}

impl DualGraph {
    pub fn vertex_count(&self) -> usize {
        self.mult.len()
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn stage_of(&self, label: u32) -> u32 {
        self.stage[(label - 1) as usize]
    }

    pub fn mult_of(&self, label: u32) -> &ExtendedExponent {
        &self.mult[(label - 1) as usize]
    }

    pub fn multiplicities(&self) -> &[ExtendedExponent] {
        &self.mult
    }

    pub fn is_free(&self, label: u32) -> bool {
        self.free[(label - 1) as usize]
    }

    pub fn free_labels(&self) -> Vec<u32> {
        (1..=self.vertex_count() as u32).filter(|&v| self.is_free(v)).collect()
    }

    pub fn st_markers(&self) -> &[u32] {
        &self.st
    }

    pub fn ell_markers(&self) -> &[u32] {
        &self.ell
    }

    pub fn neighbors(&self, label: u32) -> Vec<u32> {
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            if a == label {
                out.push(b);
            } else if b == label {
                out.push(a);
            }
        }
        out
    }

    pub fn degree(&self, label: u32) -> usize {
        self.neighbors(label).len()
    }

    /// Full adjacency list (index 0 unused), built once for whole-graph
    /// walks; per-vertex `neighbors` scans would make them quadratic.
    fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertex_count() + 1];
        for &(a, b) in &self.edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        adj
    }

    /// Run lengths of equal multiplicity within stage j (the shared junction
    /// vertex included for j >= 2). Equals the canonical digits of b'_j, or
    /// the certified digit prefix for a truncated tail.
    pub fn digit_runs(&self, j: usize) -> Result<Vec<BigInt>> {
        if j == 0 || j > self.g + 1 {
            return Err(Error::Domain(format!("stage {j} does not exist (g = {})", self.g)));
        }
        let mut vertices: Vec<u32> = Vec::new();
        if j >= 2 {
            vertices.push(self.st[j - 2]);
        }
        for v in 1..=self.vertex_count() as u32 {
            if self.stage_of(v) as usize == j {
                vertices.push(v);
            }
        }
        let mut runs: Vec<BigInt> = Vec::new();
        let mut prev: Option<&ExtendedExponent> = None;
        for v in vertices {
            let m = self.mult_of(v);
            match prev {
                Some(p) if p == m => {
                    let last = runs.last_mut().unwrap();
                    *last += BigInt::one();
                }
                _ => runs.push(BigInt::one()),
            }
            prev = Some(m);
        }
        Ok(runs)
    }

    fn marker_string(&self, label: u32) -> String {
        let mut parts = Vec::new();
        for (idx, &s) in self.st.iter().enumerate() {
            if s == label {
                parts.push(format!("st{}", idx + 1));
            }
        }
        for (idx, &l) in self.ell.iter().enumerate() {
            if l == label {
                parts.push(format!("l{}", idx + 1));
            }
        }
        if parts.is_empty() {
            "-".to_string()
        } else {
            parts.join("=")
        }
    }

    /// The far endpoint of the horizontal spine: l_{g+1} when the graph is
    /// complete, the end of the retained tail path otherwise.
    fn spine_end(&self, adj: &[Vec<u32>]) -> u32 {
        if !self.truncated {
            return *self.ell.last().expect("complete graphs mark l_{g+1}");
        }
        let tail_stage = (self.g + 1) as u32;
        let mut tail_leaf = None;
        for v in 1..=self.vertex_count() as u32 {
            if self.stage_of(v) == tail_stage && adj[v as usize].len() <= 1 {
                tail_leaf = Some(v);
            }
        }
        if let Some(v) = tail_leaf {
            return v;
        }
        if self.g >= 1 {
            // no retained tail vertices: the spine stops at st_g
            self.st[self.g - 1]
        } else {
            // truncated g = 0 path: the endpoint away from vertex 1
            (1..=self.vertex_count() as u32)
                .rev()
                .find(|&v| v != 1 && adj[v as usize].len() <= 1)
                .unwrap_or(1)
        }
    }

    /// Unique tree path between two vertices.
    fn path(&self, adj: &[Vec<u32>], from: u32, to: u32) -> Vec<u32> {
        let n = self.vertex_count();
        let mut parent: Vec<Option<u32>> = vec![None; n + 1];
        let mut seen = vec![false; n + 1];
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(from);
        seen[from as usize] = true;
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &w in &adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    parent[w as usize] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur as usize].expect("tree is connected");
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Arm hanging below a junction: the path from its non-spine neighbour
    /// down to the leaf.
    fn arm(&self, adj: &[Vec<u32>], junction: u32, spine: &BTreeSet<u32>) -> Vec<u32> {
        let mut arm = Vec::new();
        let Some(start) = adj[junction as usize].iter().copied().find(|v| !spine.contains(v))
        else {
            return arm;
        };
        let mut prev = junction;
        let mut cur = start;
        loop {
            arm.push(cur);
            let next: Vec<u32> =
                adj[cur as usize].iter().copied().filter(|&v| v != prev).collect();
            match next.as_slice() {
                [] => break,
                [only] => {
                    prev = cur;
                    cur = *only;
                }
                _ => break, // cannot happen on a valid graph
            }
        }
        arm
    }

    pub fn render(&self, format: RenderFormat) -> String {
        match format {
            RenderFormat::Structured => self.render_structured(),
            RenderFormat::Dot => self.render_dot(),
            RenderFormat::Ascii => self.render_ascii(),
        }
    }

    fn render_structured(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {} {}\n", self.vertex_count(), self.g, self.truncated));
        for v in 1..=self.vertex_count() as u32 {
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                v,
                self.stage_of(v),
                self.mult_of(v),
                self.is_free(v),
                self.marker_string(v)
            ));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    fn render_dot(&self) -> String {
        let mut out = String::from("graph dual {\n");
        for v in 1..=self.vertex_count() as u32 {
            let marker = self.marker_string(v);
            if marker == "-" {
                out.push_str(&format!(
                    "  {} [stage={}, mult=\"{}\", free={}];\n",
                    v,
                    self.stage_of(v),
                    self.mult_of(v),
                    self.is_free(v)
                ));
            } else {
                out.push_str(&format!(
                    "  {} [stage={}, mult=\"{}\", free={}, marker=\"{}\"];\n",
                    v,
                    self.stage_of(v),
                    self.mult_of(v),
                    self.is_free(v),
                    marker
                ));
            }
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  {a} -- {b};\n"));
        }
        out.push_str("}\n");
        out
    }

    fn render_ascii(&self) -> String {
        let adj = self.adjacency();
        let end = self.spine_end(&adj);
        let spine = self.path(&adj, 1, end);
        let spine_set: BTreeSet<u32> = spine.iter().copied().collect();

        let labels: Vec<String> = spine.iter().map(|v| v.to_string()).collect();
        let mut columns = Vec::with_capacity(spine.len());
        let mut spine_row = String::new();
        for (i, lab) in labels.iter().enumerate() {
            if i > 0 {
                spine_row.push_str(" - ");
            }
            columns.push(spine_row.len());
            spine_row.push_str(lab);
        }
        if self.truncated {
            spine_row.push_str(" ..");
        }

        let arms: Vec<(usize, Vec<u32>)> = spine
            .iter()
            .enumerate()
            .filter(|(_, v)| self.st.contains(v))
            .map(|(i, &v)| (columns[i], self.arm(&adj, v, &spine_set)))
            .filter(|(_, arm)| !arm.is_empty())
            .collect();

        let depth = arms.iter().map(|(_, a)| a.len()).max().unwrap_or(0);
        let mut rows = vec![spine_row];
        for level in 0..depth {
            let mut bar = String::new();
            let mut lab = String::new();
            for (col, arm) in &arms {
                if level < arm.len() {
                    while bar.len() < *col {
                        bar.push(' ');
                    }
                    bar.push('|');
                    while lab.len() < *col {
                        lab.push(' ');
                    }
                    lab.push_str(&arm[level].to_string());
                }
            }
            rows.push(bar);
            rows.push(lab);
        }
        let mut out = rows.join("\n");
        out.push('\n');
        out
    }

    /// Parses the structured-text serialization back into a graph.
    pub fn parse_structured(text: &str) -> Result<DualGraph> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty dual-graph text".into()))?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let n: usize = head[0].parse().map_err(|_| Error::Parse("bad vertex count".into()))?;
        let g: usize = head[1].parse().map_err(|_| Error::Parse("bad genus".into()))?;
        let truncated: bool = head[2].parse().map_err(|_| Error::Parse("bad truncated flag".into()))?;

        let mut stage = vec![0u32; n];
        let mut mult = vec![ExtendedExponent::zero(); n];
        let mut free = vec![false; n];
        let mut st = vec![0u32; g];
        let ell_len = if truncated { g } else { g + 1 };
        let mut ell = vec![0u32; ell_len];

        for _ in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing vertex line".into()))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 5 {
                return Err(Error::Parse(format!("bad vertex line {line:?}")));
            }
            let label: u32 = toks[0].parse().map_err(|_| Error::Parse("bad label".into()))?;
            if label == 0 || label as usize > n {
                return Err(Error::Parse(format!("label {label} out of range")));
            }
            let idx = (label - 1) as usize;
            stage[idx] = toks[1].parse().map_err(|_| Error::Parse("bad stage".into()))?;
            mult[idx] = crate::numeric::parse_extended(toks[2])?;
            free[idx] = toks[3].parse().map_err(|_| Error::Parse("bad free flag".into()))?;
            if toks[4] != "-" {
                for part in toks[4].split('=') {
                    if let Some(k) = part.strip_prefix("st") {
                        let k: usize = k.parse().map_err(|_| Error::Parse("bad marker".into()))?;
                        if k == 0 || k > g {
                            return Err(Error::Parse(format!("marker st{k} out of range")));
                        }
                        st[k - 1] = label;
                    } else if let Some(k) = part.strip_prefix('l') {
                        let k: usize = k.parse().map_err(|_| Error::Parse("bad marker".into()))?;
                        if k == 0 || k > ell_len {
                            return Err(Error::Parse(format!("marker l{k} out of range")));
                        }
                        ell[k - 1] = label;
                    } else {
                        return Err(Error::Parse(format!("bad marker token {part:?}")));
                    }
                }
            }
        }

        let mut edges = Vec::new();
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::Parse(format!("bad edge line {line:?}")));
            }
            let a: u32 = toks[0].parse().map_err(|_| Error::Parse("bad edge".into()))?;
            let b: u32 = toks[1].parse().map_err(|_| Error::Parse("bad edge".into()))?;
            if a == b || a == 0 || b == 0 || a as usize > n || b as usize > n {
                return Err(Error::Parse(format!("bad edge {a}-{b}")));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort();
        if edges.len() + 1 != n && !(n == 0 && edges.is_empty()) {
            return Err(Error::Parse(format!(
                "edge count {} does not match a tree on {n} vertices",
                edges.len()
            )));
        }
        if st.contains(&0) || ell.contains(&0) {
            return Err(Error::Parse("incomplete marker set".into()));
        }
        Ok(DualGraph { g, truncated, edges, stage, mult, free, st, ell })
    }
}

/// Compares two exact multiplicity values, refining enclosures as needed.
fn cmp_values(a: &ExtendedExponent, b: &ExtendedExponent, budget: u32) -> Result<Ordering> {
    a.sub(b).sign(budget)
}

struct Builder {
    mult: Vec<ExtendedExponent>,
    stage: Vec<u32>,
    adj: Vec<BTreeSet<u32>>, // index 0 unused
    cap: Vec<ExtendedExponent>,
    prox_preds: Vec<Vec<u32>>,
    prox_children: Vec<Vec<u32>>,
    free: Vec<bool>,
    budget: u32,
    stats: BuildStats,
}

impl Builder {
    fn new(budget: u32) -> Self {
        Builder {
            mult: Vec::new(),
            stage: Vec::new(),
            adj: vec![BTreeSet::new()],
            cap: vec![ExtendedExponent::zero()],
            prox_preds: vec![Vec::new()],
            prox_children: vec![Vec::new()],
            free: Vec::new(),
            budget,
            stats: BuildStats::default(),
        }
    }

    fn add_edge(&mut self, a: u32, b: u32) {
        self.adj[a as usize].insert(b);
        self.adj[b as usize].insert(a);
    }

    fn remove_edge(&mut self, a: u32, b: u32) {
        self.adj[a as usize].remove(&b);
        self.adj[b as usize].remove(&a);
    }

    /// Blows up the next point with multiplicity m.
    fn push_vertex(&mut self, m: ExtendedExponent, stage: u32) -> Result<()> {
        if self.mult.len() >= MAX_VERTICES {
            return Err(Error::GraphTooLarge(self.mult.len() + 1));
        }
        self.mult.push(m.clone());
        self.stage.push(stage);
        self.adj.push(BTreeSet::new());
        self.cap.push(m.clone());
        self.prox_preds.push(Vec::new());
        self.prox_children.push(Vec::new());
        let label = self.mult.len() as u32;
        if label == 1 {
            self.free.push(true);
            return Ok(());
        }

        let pred = label - 1;
        let mut candidates = Vec::new();
        for &k in self.adj[pred as usize].clone().iter() {
            if cmp_values(&self.cap[k as usize], &m, self.budget)? != Ordering::Less {
                candidates.push(k);
            }
        }
        let partner = match candidates.len() {
            0 => None,
            1 => Some(candidates[0]),
            2 => {
                self.stats.tie_breaks += 1;
                Some(*candidates.iter().max().unwrap())
            }
            _ => {
                return Err(Error::GraphInvariant(format!(
                    "vertex {label}: predecessor has more than two admitting neighbours"
                )))
            }
        };

        // always proximate to the predecessor
        self.prox_preds[label as usize].push(pred);
        self.prox_children[pred as usize].push(label);
        self.cap[pred as usize] = self.cap[pred as usize].sub(&m);

        match partner {
            None => {
                self.add_edge(pred, label);
                self.free.push(true);
            }
            Some(k) => {
                self.prox_preds[label as usize].push(k);
                self.prox_children[k as usize].push(label);
                self.cap[k as usize] = self.cap[k as usize].sub(&m);
                self.remove_edge(pred, k);
                self.add_edge(pred, label);
                self.add_edge(k, label);
                self.free.push(false);
            }
        }
        Ok(())
    }

    /// Subtractive Euclid on an integer pair, emitting one vertex per step
    /// and stopping when a component reaches zero; the survivor must be the
    /// expected gcd.
    fn integer_stage(
        &mut self,
        mut a: BigInt,
        mut b: BigInt,
        expected_gcd: &BigInt,
        stage: u32,
    ) -> Result<()> {
        while a.is_positive() && b.is_positive() {
            let m = if a <= b { a.clone() } else { b.clone() };
            self.push_vertex(ExtendedExponent::Rational(rational_from_int(m.clone())), stage)?;
            if a >= b {
                a -= &b;
            } else {
                b -= &a;
            }
        }
        let survivor = if a.is_zero() { b } else { a };
        if survivor != *expected_gcd {
            return Err(Error::GraphInvariant(format!(
                "stage {stage}: subtractive Euclid ended at {survivor}, expected {expected_gcd}"
            )));
        }
        Ok(())
    }

    /// Truncated irrational tail: emissions are driven by the certified digit
    /// prefix. Levels follow L_1 = scale, L_2 = scale*(x - a_1), and
    /// L_{r+1} = L_{r-1} - a_r L_r; run r has a_r emissions (a_1 - 1 for the
    /// first run when the junction is shared).
    fn tail_stage(
        &mut self,
        last: &ExtendedExponent,
        digits: &[BigInt],
        shares_junction: bool,
        stage: u32,
    ) -> Result<()> {
        let level1 = ExtendedExponent::Rational(Rational::one());
        // L_2 = x - a_1 where x is the tail exponent
        let level2 = last.add_rational(&-rational_from_int(digits[0].clone()));
        let mut prev = level1.clone();
        let mut cur = level2;
        for (r, d) in digits.iter().enumerate() {
            let count = d
                .to_usize()
                .ok_or(Error::GraphTooLarge(MAX_VERTICES + 1))?;
            let count = if r == 0 && shares_junction { count - 1 } else { count };
            if r == 0 {
                for _ in 0..count {
                    self.push_vertex(level1.clone(), stage)?;
                }
            } else {
                for _ in 0..count {
                    self.push_vertex(cur.clone(), stage)?;
                }
                let next = prev.sub(&cur.mul_rational(&rational_from_int(d.clone())));
                prev = cur;
                cur = next;
            }
        }
        Ok(())
    }
}

/// Builds the dual graph of a class. `tail_digits` is used only for
/// irrational classes: the infinite tail is truncated after that many
/// certified continued-fraction digits.
pub fn build(t: &DiscreteClass, tail_digits: usize, budget: u32) -> Result<DualGraph> {
    build_with_stats(t, tail_digits, budget).map(|(g, _)| g)
}

pub fn build_with_stats(
    t: &DiscreteClass,
    tail_digits: usize,
    budget: u32,
) -> Result<(DualGraph, BuildStats)> {
    let g = t.g();
    let data = contact_data(t);
    let mut b = Builder::new(budget);
    let mut stage_digits: Vec<Vec<BigInt>> = Vec::new();

    // rational stages 1..g
    if g >= 1 {
        let d1 = cf_expand(&t.beta_prime_rat(1))?;
        stage_digits.push(d1.digits().to_vec());
        b.integer_stage(data.beta_bar[1].clone(), data.beta_bar[0].clone(), &data.e[1], 1)?;
        for j in 2..=g {
            let dj = cf_expand(&t.beta_prime_rat(j))?;
            stage_digits.push(dj.digits().to_vec());
            let x = rational_from_int(data.e[j - 1].clone()) * (t.beta_prime_rat(j) - Rational::one());
            debug_assert!(x.is_integer());
            b.integer_stage(x.to_integer(), data.e[j - 1].clone(), &data.e[j], j as u32)?;
        }
    }

    // tail stage g+1 (for g = 0 the whole graph is the tail)
    let truncated = match t.last() {
        ExtendedExponent::Rational(m) => {
            let m = m.to_integer();
            stage_digits.push(vec![m.clone()]);
            if g == 0 {
                b.integer_stage(m, BigInt::one(), &BigInt::one(), 1)?;
            } else {
                b.integer_stage(m - BigInt::one(), BigInt::one(), &BigInt::one(), (g + 1) as u32)?;
            }
            false
        }
        ExtendedExponent::Irrational(_) => {
            if tail_digits == 0 {
                return Err(Error::Domain("irrational classes need tail_digits >= 1".into()));
            }
            let digits = t.last().cf_prefix(tail_digits, budget)?;
            b.tail_stage(t.last(), &digits, g >= 1, (g + 1) as u32)?;
            stage_digits.push(digits);
            true
        }
    };

    let n = b.mult.len();
    if n == 0 {
        return Err(Error::GraphInvariant("no vertices emitted".into()));
    }

    // markers: st_j is the last vertex of stage j
    let mut st = Vec::with_capacity(g);
    for j in 1..=g {
        let last = (1..=n)
            .rev()
            .find(|&i| b.stage[i - 1] as usize == j)
            .ok_or_else(|| Error::GraphInvariant(format!("stage {j} emitted no vertices")))?;
        st.push(last as u32);
    }

    let edges: Vec<(u32, u32)> = {
        let mut es = Vec::new();
        for v in 1..=n as u32 {
            for &w in b.adj[v as usize].iter() {
                if v < w {
                    es.push((v, w));
                }
            }
        }
        es.sort();
        es
    };

    let mut graph = DualGraph {
        g,
        truncated,
        edges,
        stage: b.stage.clone(),
        mult: b.mult.clone(),
        free: b.free.clone(),
        st,
        ell: Vec::new(),
    };

    // l_1..l_g are the arm leaves; l_{g+1} = n for complete graphs
    let adj = graph.adjacency();
    let end = if truncated { graph.spine_end(&adj) } else { n as u32 };
    let spine: BTreeSet<u32> = graph.path(&adj, 1, end).into_iter().collect();
    let mut ell = Vec::with_capacity(g + 1);
    for j in 1..=g {
        let stj = graph.st[j - 1];
        if !spine.contains(&stj) {
            return Err(Error::GraphInvariant(format!("st_{j} = {stj} is not on the spine")));
        }
        let arm = graph.arm(&adj, stj, &spine);
        let leaf = arm.last().copied().ok_or_else(|| {
            Error::GraphInvariant(format!("st_{j} = {stj} has no hanging arm"))
        })?;
        ell.push(leaf);
    }
    if !truncated {
        ell.push(n as u32);
    }
    graph.ell = ell;

    check_invariants(&graph, &b, &stage_digits)?;
    Ok((graph, b.stats))
}

/// The post-construction battery. Any failure is a model breach and aborts
/// the build.
fn check_invariants(graph: &DualGraph, b: &Builder, stage_digits: &[Vec<BigInt>]) -> Result<()> {
    let n = graph.vertex_count();
    let g = graph.g;

    // tree shape: n-1 edges, connected
    if graph.edges.len() + 1 != n {
        return Err(Error::GraphInvariant(format!(
            "{} edges on {n} vertices is not a tree",
            graph.edges.len()
        )));
    }
    let adj = graph.adjacency();
    {
        let mut seen = vec![false; n + 1];
        let mut stack = vec![1u32];
        seen[1] = true;
        let mut count = 0;
        while let Some(v) = stack.pop() {
            count += 1;
            for &w in &adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        if count != n {
            return Err(Error::GraphInvariant("graph is not connected".into()));
        }
    }

    // degree bound and junction census
    let mut degree3 = Vec::new();
    for v in 1..=n as u32 {
        let d = adj[v as usize].len();
        if d > 3 {
            return Err(Error::GraphInvariant(format!("vertex {v} has degree {d} > 3")));
        }
        if d == 3 {
            degree3.push(v);
        }
    }
    let tail_vertices = (1..=n as u32)
        .filter(|&v| graph.stage_of(v) as usize == g + 1)
        .count();
    let tail_nonempty = if g == 0 { false } else { tail_vertices > 0 };
    let expected_junctions = if g == 0 {
        0
    } else if tail_nonempty {
        g
    } else {
        g - 1
    };
    if degree3.len() != expected_junctions {
        return Err(Error::GraphInvariant(format!(
            "{} degree-3 vertices, expected {expected_junctions}",
            degree3.len()
        )));
    }
    for v in &degree3 {
        if !graph.st.contains(v) {
            return Err(Error::GraphInvariant(format!(
                "degree-3 vertex {v} is not a junction marker"
            )));
        }
    }

    // digit law: run lengths per stage match the canonical digits (or the
    // certified prefix for a truncated tail)
    for (idx, expected) in stage_digits.iter().enumerate() {
        let j = idx + 1;
        let runs = graph.digit_runs(j)?;
        if runs != *expected {
            return Err(Error::GraphInvariant(format!(
                "stage {j}: runs {runs:?} differ from digits {expected:?}"
            )));
        }
    }

    // multiplicities non-increasing within each stage (exact check on the
    // rational part; affine tails are covered by the digit law)
    for v in 2..=n as u32 {
        if graph.stage_of(v) != graph.stage_of(v - 1) {
            continue;
        }
        if let (Some(a), Some(bv)) = (graph.mult_of(v - 1).as_rational(), graph.mult_of(v).as_rational()) {
            if bv > a {
                return Err(Error::GraphInvariant(format!(
                    "multiplicity increases from vertex {} to {}",
                    v - 1,
                    v
                )));
            }
        }
    }

    // free census per stage: run1 emissions + 1 iff a second run exists
    for (idx, digits) in stage_digits.iter().enumerate() {
        let j = idx + 1;
        let run1 = digits[0]
            .to_usize()
            .ok_or(Error::GraphTooLarge(MAX_VERTICES + 1))?;
        let run1_new = if j == 1 { run1 } else { run1 - 1 };
        let stage_free = (1..=n as u32)
            .filter(|&v| graph.stage_of(v) as usize == j && graph.is_free(v))
            .count();
        let stage_total = (1..=n as u32)
            .filter(|&v| graph.stage_of(v) as usize == j)
            .count();
        let second_run_retained = stage_total > run1_new;
        let expected_free = run1_new + usize::from(digits.len() >= 2 && second_run_retained);
        if stage_free != expected_free {
            return Err(Error::GraphInvariant(format!(
                "stage {j}: {stage_free} free vertices, census expects {expected_free}"
            )));
        }
    }

    // proximity equality at every saturated vertex, from the recorded
    // proximity lists rather than the incremental capacities
    for v in 1..=n as u32 {
        let mut load = ExtendedExponent::zero();
        for &c in &b.prox_children[v as usize] {
            load = load.add(graph.mult_of(c));
        }
        let residual = graph.mult_of(v).sub(&load);
        if residual != b.cap[v as usize] {
            return Err(Error::GraphInvariant(format!(
                "vertex {v}: recomputed capacity disagrees with the simulation"
            )));
        }
        let saturated = b.cap[v as usize] == ExtendedExponent::zero();
        if saturated && load != *graph.mult_of(v) {
            return Err(Error::GraphInvariant(format!(
                "vertex {v}: saturated but proximity sum differs from multiplicity"
            )));
        }
        let preds = b.prox_preds[v as usize].len();
        if graph.is_free(v) != (preds <= 1) {
            return Err(Error::GraphInvariant(format!(
                "vertex {v}: free flag disagrees with proximity predecessors"
            )));
        }
    }

    // vertex count formula: S_1 + sum_{j>=2} (S_j - 1)
    let mut expected_n = BigInt::zero();
    for (idx, digits) in stage_digits.iter().enumerate() {
        let s: BigInt = digits.iter().sum();
        expected_n += if idx == 0 { s } else { s - BigInt::one() };
    }
    if expected_n != BigInt::from(n) {
        return Err(Error::GraphInvariant(format!(
            "vertex count {n} does not match the digit-sum formula {expected_n}"
        )));
    }

    Ok(())
}
