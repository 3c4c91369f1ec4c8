//! Ultra-sparse regular non-binary LDPC codes (variable degree 2).
//!
//! With every column of weight two, the Tanner graph is a `d_c`-regular
//! multigraph on the checks, one edge per symbol. Construction grows that
//! graph edge by edge in progressive-edge-growth order: each new symbol joins
//! a least-loaded check and then the admissible check farthest from it, so
//! the shortest cycle through the new symbol is as long as possible.

use crate::error::{Error, Result};
use crate::galois::{Field, FieldElement};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

/// Variable-node degree of every code in this module.
pub const VN_DEGREE: usize = 2;

const GRAPH_ATTEMPTS: usize = 200;
const COEFFICIENT_ATTEMPTS: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct NbLdpcCode {
    field: Arc<Field>,
    n: usize,
    m: usize,
    dc: usize,
    rows: Vec<Vec<(usize, FieldElement)>>,
    /// `(row, slot)` of both edges of each column.
    col_edges: Vec<[(usize, usize); 2]>,
    info_cols: Vec<usize>,
    parity_cols: Vec<usize>,
    /// Row `r` gives parity symbol `parity_cols[r]` as a combination of the info symbols.
    parity_matrix: Vec<FieldElement>,
}

impl NbLdpcCode {
    /// Builds a `(2, d_c)`-regular code over `field` with `n_c` symbols.
    pub fn construct(field: Arc<Field>, n_c: usize, d_c: usize, seed: u64) -> Result<NbLdpcCode> {
        if d_c < 3 {
            return Err(Error::CodeParams(format!("check degree {d_c} < 3")));
        }
        if n_c == 0 || (VN_DEGREE * n_c) % d_c != 0 {
            return Err(Error::CodeParams(format!(
                "2·n_c = {} is not a multiple of d_c = {d_c}",
                2 * n_c
            )));
        }
        let m = VN_DEGREE * n_c / d_c;
        if m < 2 {
            return Err(Error::CodeParams(format!(
                "n_c = {n_c} gives {m} check(s); degree-2 columns need two distinct checks"
            )));
        }
        if field.order() < 2 {
            return Err(Error::CodeParams("field too small".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..GRAPH_ATTEMPTS {
            let Some(mut cols) = peg_graph(n_c, m, d_c, &mut rng) else {
                continue;
            };
            improve_girth(m, &mut cols, &mut rng);
            for _ in 0..COEFFICIENT_ATTEMPTS {
                let mut rows: Vec<Vec<(usize, FieldElement)>> = vec![Vec::with_capacity(d_c); m];
                for (i, pair) in cols.iter().enumerate() {
                    for &r in pair {
                        let h = FieldElement(rng.gen_range(1..field.order()) as u16);
                        rows[r].push((i, h));
                    }
                }
                for row in rows.iter_mut() {
                    row.sort_by_key(|&(c, _)| c);
                }
                if let Some(parity) = select_parity_columns(&field, n_c, &rows) {
                    return NbLdpcCode::with_parity(field, n_c, rows, parity);
                }
            }
            return Err(Error::RankDeficient(COEFFICIENT_ATTEMPTS));
        }
        Err(Error::CodeParams(format!(
            "no girth-6 placement found for n_c = {n_c}, d_c = {d_c}"
        )))
    }

    /// Builds a code from explicit rows and a choice of parity columns
    /// (one per row, giving an invertible square submatrix).
    pub fn with_parity(
        field: Arc<Field>,
        n_c: usize,
        rows: Vec<Vec<(usize, FieldElement)>>,
        parity_cols: Vec<usize>,
    ) -> Result<NbLdpcCode> {
        let m = rows.len();
        if m == 0 || m >= n_c {
            return Err(Error::CodeParams(format!("{m} rows for {n_c} columns")));
        }
        let dc = rows[0].len();
        let mut col_slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_c];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dc {
                return Err(Error::CodeParams(format!(
                    "row {r} has weight {}, expected {dc}",
                    row.len()
                )));
            }
            for (s, &(c, h)) in row.iter().enumerate() {
                if c >= n_c {
                    return Err(Error::CodeParams(format!("column {c} out of range")));
                }
                if h == FieldElement::ZERO || h.index() >= field.order() {
                    return Err(Error::CodeParams(format!("invalid coefficient {h} in row {r}")));
                }
                col_slots[c].push((r, s));
            }
        }
        let mut col_edges = Vec::with_capacity(n_c);
        for (c, slots) in col_slots.iter().enumerate() {
            if slots.len() != VN_DEGREE {
                return Err(Error::CodeParams(format!(
                    "column {c} has weight {}, expected {VN_DEGREE}",
                    slots.len()
                )));
            }
            if slots[0].0 == slots[1].0 {
                return Err(Error::CodeParams(format!("column {c} repeats row {}", slots[0].0)));
            }
            col_edges.push([slots[0], slots[1]]);
        }
        if parity_cols.len() != m {
            return Err(Error::Length {
                expected: m,
                got: parity_cols.len(),
            });
        }
        let mut is_parity = vec![false; n_c];
        for &c in &parity_cols {
            if c >= n_c || is_parity[c] {
                return Err(Error::CodeParams(format!("bad parity column {c}")));
            }
            is_parity[c] = true;
        }
        let info_cols: Vec<usize> = (0..n_c).filter(|&c| !is_parity[c]).collect();
        let parity_matrix = solve_parity(&field, n_c, &rows, &parity_cols, &info_cols)
            .ok_or(Error::RankDeficient(1))?;
        Ok(NbLdpcCode {
            field,
            n: n_c,
            m,
            dc,
            rows,
            col_edges,
            info_cols,
            parity_cols,
            parity_matrix,
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// Codeword length `n_c` in symbols.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of checks `m_c`.
    pub fn checks(&self) -> usize {
        self.m
    }

    /// Information symbols `k_c = n_c - m_c`.
    pub fn dimension(&self) -> usize {
        self.n - self.m
    }

    pub fn check_degree(&self) -> usize {
        self.dc
    }

    /// `1 - 2/d_c`.
    pub fn design_rate(&self) -> f64 {
        1.0 - VN_DEGREE as f64 / self.dc as f64
    }

    /// `k_c / n_c`.
    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.n as f64
    }

    /// Per-check `(column, coefficient)` lists.
    pub fn rows(&self) -> &[Vec<(usize, FieldElement)>] {
        &self.rows
    }

    /// `(row, slot)` of both edges of column `c`.
    pub fn column_edges(&self, c: usize) -> [(usize, usize); 2] {
        self.col_edges[c]
    }

    /// Columns carrying information symbols, ascending.
    pub fn info_columns(&self) -> &[usize] {
        &self.info_cols
    }

    /// Columns carrying parity symbols.
    pub fn parity_columns(&self) -> &[usize] {
        &self.parity_cols
    }

    /// Systematic encoding: `info[t]` lands in column `info_columns()[t]`.
    pub fn encode(&self, info: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let k = self.dimension();
        if info.len() != k {
            return Err(Error::Length {
                expected: k,
                got: info.len(),
            });
        }
        let mut word = vec![FieldElement::ZERO; self.n];
        for (&c, &v) in self.info_cols.iter().zip(info) {
            word[c] = v;
        }
        for (r, &pc) in self.parity_cols.iter().enumerate() {
            let row = &self.parity_matrix[r * k..(r + 1) * k];
            let mut acc = FieldElement::ZERO;
            for (&g, &v) in row.iter().zip(info) {
                acc = self.field.add(acc, self.field.mul(g, v));
            }
            word[pc] = acc;
        }
        Ok(word)
    }

    /// `s_j = Σ h_{j,i}·c_i`.
    pub fn syndrome(&self, word: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if word.len() != self.n {
            return Err(Error::Length {
                expected: self.n,
                got: word.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                row.iter().fold(FieldElement::ZERO, |acc, &(c, h)| {
                    self.field.add(acc, self.field.mul(h, word[c]))
                })
            })
            .collect())
    }

    pub fn is_codeword(&self, word: &[FieldElement]) -> bool {
        self.rows.iter().all(|row| {
            row.iter().fold(FieldElement::ZERO, |acc, &(c, h)| {
                self.field.add(acc, self.field.mul(h, word[c]))
            }) == FieldElement::ZERO
        })
    }

    /// Rank of `H` over GF(q).
    pub fn rank(&self) -> usize {
        let mut dense = dense_matrix(&self.field, self.n, &self.rows);
        gauss_rank(&self.field, self.n, &mut dense)
    }

    /// Length of the shortest Tanner-graph cycle (`usize::MAX` if acyclic).
    pub fn girth(&self) -> usize {
        tanner_girth(self.m, &self.col_edges.iter().map(|e| [e[0].0, e[1].0]).collect::<Vec<_>>())
    }

    /// `H` as a dense row-major `m_c × n_c` matrix.
    pub fn dense(&self) -> Vec<FieldElement> {
        dense_matrix(&self.field, self.n, &self.rows)
    }

    /// Serializes to the q-ary alist-style text format:
    ///
    /// ```text
    /// n_c m_c q d_v d_c poly
    /// <m_c lines of 1-based "column coefficient" pairs>
    /// <k_c info columns then m_c parity columns, 1-based>
    /// ```
    pub fn to_alist(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} {} {} {} {} {:#x}",
            self.n,
            self.m,
            self.field.order(),
            VN_DEGREE,
            self.dc,
            self.field.poly()
        );
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|(c, h)| format!("{} {}", c + 1, h.0)).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        let perm: Vec<String> = self
            .info_cols
            .iter()
            .chain(&self.parity_cols)
            .map(|c| (c + 1).to_string())
            .collect();
        let _ = writeln!(s, "{}", perm.join(" "));
        s
    }

    /// Parses [`NbLdpcCode::to_alist`] output. Lines starting with `#` are skipped.
    pub fn from_alist(text: &str) -> Result<NbLdpcCode> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let perr = |msg: &str| Error::Parse(msg.to_string());
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| perr("missing header"))?
            .split_whitespace()
            .collect();
        if header.len() != 5 && header.len() != 6 {
            return Err(perr("header must be 'n_c m_c q d_v d_c [poly]'"));
        }
        let num = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad integer '{s}'")))
        };
        let (n, m, q, dv, dc) = (
            num(header[0])?,
            num(header[1])?,
            num(header[2])?,
            num(header[3])?,
            num(header[4])?,
        );
        if dv != VN_DEGREE {
            return Err(perr("only d_v = 2 is supported"));
        }
        if !q.is_power_of_two() || q < 2 {
            return Err(perr("q must be a power of two"));
        }
        let p = q.trailing_zeros();
        let poly = match header.get(5) {
            Some(s) => Some(
                u32::from_str_radix(s.trim_start_matches("0x"), 16)
                    .map_err(|_| Error::Parse(format!("bad polynomial '{s}'")))?,
            ),
            None => None,
        };
        let field = Arc::new(Field::new(p, poly)?);
        let mut rows = Vec::with_capacity(m);
        for r in 0..m {
            let vals: Vec<usize> = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {}", r + 1)))?
                .split_whitespace()
                .map(num)
                .collect::<Result<_>>()?;
            if vals.len() != 2 * dc {
                return Err(Error::Parse(format!("row {} has {} entries", r + 1, vals.len())));
            }
            let row = vals
                .chunks(2)
                .map(|pair| {
                    if pair[0] == 0 || pair[0] > n || pair[1] >= q {
                        Err(Error::Parse(format!("bad entry in row {}", r + 1)))
                    } else {
                        Ok((pair[0] - 1, FieldElement(pair[1] as u16)))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let perm: Vec<usize> = lines
            .next()
            .ok_or_else(|| perr("missing column permutation"))?
            .split_whitespace()
            .map(num)
            .collect::<Result<_>>()?;
        if perm.len() != n || perm.iter().any(|&c| c == 0 || c > n) {
            return Err(perr("column permutation must list all n_c columns"));
        }
        if lines.next().is_some() {
            return Err(perr("trailing content"));
        }
        let parity: Vec<usize> = perm[n - m..].iter().map(|c| c - 1).collect();
        let code = NbLdpcCode::with_parity(field, n, rows, parity)?;
        let info: Vec<usize> = perm[..n - m].iter().map(|c| c - 1).collect();
        if info != code.info_cols {
            return Err(perr("info columns must be listed in ascending order"));
        }
        Ok(code)
    }
}

/// Progressive edge growth on the check graph. Returns the two checks of each column.
fn peg_graph(n: usize, m: usize, dc: usize, rng: &mut ChaCha8Rng) -> Option<Vec<[usize; 2]>> {
    // Random tie-break rank for each check.
    let mut tie: Vec<usize> = (0..m).collect();
    tie.shuffle(rng);
    let mut degree = vec![0usize; m];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut cols = Vec::with_capacity(n);
    let mut dist = vec![usize::MAX; m];
    let mut queue = VecDeque::new();
    for _ in 0..n {
        let first = (0..m)
            .filter(|&c| degree[c] < dc)
            .min_by_key(|&c| (degree[c], tie[c]))?;
        // BFS distances from the first check through the current graph.
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[first] = 0;
        queue.clear();
        queue.push_back(first);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let second = (0..m)
            .filter(|&c| c != first && degree[c] < dc)
            .max_by(|&a, &b| {
                dist[a]
                    .cmp(&dist[b])
                    .then(degree[b].cmp(&degree[a]))
                    .then(tie[b].cmp(&tie[a]))
            });
        match second {
            // Distance 1 would close a 4-cycle.
            Some(second) if dist[second] >= 2 => {
                degree[first] += 1;
                degree[second] += 1;
                adj[first].push(second);
                adj[second].push(first);
                cols.push([first, second]);
            }
            _ => {
                let partner = second.unwrap_or(first);
                if !swap_in(first, partner, &mut adj, &mut cols, rng) {
                    return None;
                }
                degree[first] += 1;
                degree[partner] += 1;
            }
        }
    }
    Some(cols)
}

/// Per check-graph edge, the length of the shortest cycle through it
/// (`usize::MAX` on bridges).
fn edge_cycles(m: usize, cols: &[[usize; 2]], adj: &mut Vec<Vec<(usize, usize)>>, out: &mut Vec<usize>) {
    adj.iter_mut().for_each(Vec::clear);
    adj.resize(m, Vec::new());
    for (i, &[a, b]) in cols.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    out.clear();
    let mut dist = vec![usize::MAX; m];
    let mut queue = VecDeque::new();
    for (i, &[a, b]) in cols.iter().enumerate() {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[a] = 0;
        queue.clear();
        queue.push_back(a);
        'bfs: while let Some(u) = queue.pop_front() {
            for &(v, e) in &adj[u] {
                if e != i && dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    if v == b {
                        break 'bfs;
                    }
                    queue.push_back(v);
                }
            }
        }
        out.push(dist[b].saturating_add(1));
    }
}

/// `(girth, edges on a shortest cycle)` of the check graph; larger girth and fewer edges are better.
fn girth_score(cycles: &[usize]) -> (usize, usize) {
    let g = cycles.iter().copied().min().unwrap_or(usize::MAX);
    (g, cycles.iter().filter(|&&c| c == g).count())
}

/// Proposals without improvement before the girth search stops.
const GIRTH_PATIENCE: usize = 2000;

/// Degree-preserving double-edge swaps that lengthen or thin out the
/// shortest cycles of the check graph.
fn improve_girth(m: usize, cols: &mut [[usize; 2]], rng: &mut ChaCha8Rng) {
    let mut linked = vec![false; m * m];
    for &[a, b] in cols.iter() {
        linked[a * m + b] = true;
        linked[b * m + a] = true;
    }
    let mut adj = Vec::new();
    let mut cycles = Vec::new();
    edge_cycles(m, cols, &mut adj, &mut cycles);
    let mut score = girth_score(&cycles);
    let mut trial = Vec::new();
    let mut idle = 0;
    while idle < GIRTH_PATIENCE && score.0 != usize::MAX {
        idle += 1;
        let worst: Vec<usize> = (0..cols.len()).filter(|&i| cycles[i] == score.0).collect();
        let e1 = worst[rng.gen_range(0..worst.len())];
        let e2 = rng.gen_range(0..cols.len());
        let ([a, b], [c, d]) = (cols[e1], cols[e2]);
        let (x, y) = if rng.gen::<bool>() { ([a, c], [b, d]) } else { ([a, d], [b, c]) };
        if x[0] == x[1] || y[0] == y[1] || linked[x[0] * m + x[1]] || linked[y[0] * m + y[1]] || e1 == e2 {
            continue;
        }
        let (old1, old2) = (cols[e1], cols[e2]);
        cols[e1] = x;
        cols[e2] = y;
        edge_cycles(m, cols, &mut adj, &mut trial);
        let s = girth_score(&trial);
        let better = s.0 > score.0 || (s.0 == score.0 && s.1 < score.1);
        // Sideways moves let the search leave plateaus.
        if better || s == score {
            for [u, v] in [old1, old2] {
                linked[u * m + v] = false;
                linked[v * m + u] = false;
            }
            for [u, v] in [x, y] {
                linked[u * m + v] = true;
                linked[v * m + u] = true;
            }
            std::mem::swap(&mut cycles, &mut trial);
            score = s;
            if better {
                idle = 0;
            }
        } else {
            cols[e1] = old1;
            cols[e2] = old2;
        }
    }
}

/// Rewires a random column `(u, v)` to `(a, u)` and adds a column `(b, v)`,
/// keeping the check graph simple. Returns false if no column qualifies.
fn swap_in(
    a: usize,
    b: usize,
    adj: &mut [Vec<usize>],
    cols: &mut Vec<[usize; 2]>,
    rng: &mut ChaCha8Rng,
) -> bool {
    let mut order: Vec<usize> = (0..cols.len()).collect();
    order.shuffle(rng);
    for e in order {
        for [u, v] in [cols[e], [cols[e][1], cols[e][0]]] {
            if [a, b].contains(&u) || [a, b].contains(&v) {
                continue;
            }
            if adj[a].contains(&u) || adj[b].contains(&v) || (a == b && adj[a].contains(&v)) {
                continue;
            }
            adj[u].retain(|&x| x != v);
            adj[v].retain(|&x| x != u);
            adj[a].push(u);
            adj[u].push(a);
            adj[b].push(v);
            adj[v].push(b);
            cols[e] = [a, u];
            cols.push([b, v]);
            return true;
        }
    }
    false
}

/// Shortest cycle in the Tanner graph of a degree-2 code given the two checks of each column.
fn tanner_girth(m: usize, cols: &[[usize; 2]]) -> usize {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for (i, &[a, b]) in cols.iter().enumerate() {
        if a == b {
            return 2;
        }
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    // Removing one column-edge and finding the shortest check path between its ends.
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; m];
    let mut queue = VecDeque::new();
    for (i, &[a, b]) in cols.iter().enumerate() {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[a] = 0;
        queue.clear();
        queue.push_back(a);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &(v, e) in &adj[u] {
                if e != i && dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if dist[b] != usize::MAX {
            // Check-graph cycle of length dist+1; each check-graph edge is two Tanner edges.
            best = best.min(2 * (dist[b] + 1));
        }
    }
    best
}

fn dense_matrix(field: &Field, n: usize, rows: &[Vec<(usize, FieldElement)>]) -> Vec<FieldElement> {
    let _ = field;
    let mut dense = vec![FieldElement::ZERO; rows.len() * n];
    for (r, row) in rows.iter().enumerate() {
        for &(c, h) in row {
            dense[r * n + c] = h;
        }
    }
    dense
}

fn gauss_rank(field: &Field, n: usize, dense: &mut [FieldElement]) -> usize {
    let m = dense.len() / n;
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..m).find(|&r| dense[r * n + col] != FieldElement::ZERO) else {
            continue;
        };
        swap_rows(dense, n, rank, piv);
        eliminate(field, dense, n, rank, col);
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

fn swap_rows(dense: &mut [FieldElement], n: usize, a: usize, b: usize) {
    if a != b {
        for c in 0..n {
            dense.swap(a * n + c, b * n + c);
        }
    }
}

/// Normalizes the pivot row and clears the pivot column from every other row.
fn eliminate(field: &Field, dense: &mut [FieldElement], n: usize, prow: usize, pcol: usize) {
    let m = dense.len() / n;
    let inv = field.inv(dense[prow * n + pcol]).expect("non-zero pivot");
    for c in 0..n {
        dense[prow * n + c] = field.mul(dense[prow * n + c], inv);
    }
    for r in 0..m {
        if r == prow {
            continue;
        }
        let f = dense[r * n + pcol];
        if f == FieldElement::ZERO {
            continue;
        }
        for c in 0..n {
            let v = field.mul(f, dense[prow * n + c]);
            dense[r * n + c] = field.add(dense[r * n + c], v);
        }
    }
}

/// Picks parity columns by Gauss–Jordan elimination with column pivoting,
/// scanning columns from the last one down. `None` if `H` is rank deficient.
fn select_parity_columns(
    field: &Field,
    n: usize,
    rows: &[Vec<(usize, FieldElement)>],
) -> Option<Vec<usize>> {
    let m = rows.len();
    let mut dense = dense_matrix(field, n, rows);
    let mut pivots = Vec::with_capacity(m);
    let mut rank = 0;
    for col in (0..n).rev() {
        let Some(piv) = (rank..m).find(|&r| dense[r * n + col] != FieldElement::ZERO) else {
            continue;
        };
        swap_rows(&mut dense, n, rank, piv);
        eliminate(field, &mut dense, n, rank, col);
        pivots.push(col);
        rank += 1;
        if rank == m {
            return Some(pivots);
        }
    }
    None
}

/// Reduces `H` so that the parity columns form an identity, and returns the
/// remaining `m × k` block over the info columns.
fn solve_parity(
    field: &Field,
    n: usize,
    rows: &[Vec<(usize, FieldElement)>],
    parity_cols: &[usize],
    info_cols: &[usize],
) -> Option<Vec<FieldElement>> {
    let m = rows.len();
    let mut dense = dense_matrix(field, n, rows);
    for (r, &col) in parity_cols.iter().enumerate() {
        let piv = (r..m).find(|&i| dense[i * n + col] != FieldElement::ZERO)?;
        swap_rows(&mut dense, n, r, piv);
        eliminate(field, &mut dense, n, r, col);
    }
    // Row r now reads c[parity_cols[r]] + Σ_info g·c[info] = 0 (characteristic two).
    let k = info_cols.len();
    let mut out = vec![FieldElement::ZERO; m * k];
    for r in 0..m {
        for (t, &c) in info_cols.iter().enumerate() {
            out[r * k + t] = dense[r * n + c];
        }
    }
    Some(out)
}
