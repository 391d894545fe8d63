//! Brute-force checkers and instance generators shared by the integration
//! tests. Nothing here calls the library's own verifiers.

#![allow(dead_code)]

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tricube::dense::{AssignmentEntry, PartialAssignment};
use tricube::{ColouredGraph, CubeVertex, Embedding, InitialSubcube};

pub fn binom(n: u64, k: u64) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row.get(k as usize).copied().unwrap_or(0)
}

/// Whether every pair `{x, x ^ 2^i}` with both ends mapped goes to distinct
/// red-adjacent vertices, and the map is injective on its domain.
pub fn partial_map_is_red(g: &ColouredGraph, n: u32, phi: &Embedding) -> Result<(), String> {
    let mut seen = HashSet::new();
    for x in 0..1u32 << n {
        let Some(v) = phi.get(CubeVertex(x)) else {
            continue;
        };
        if v >= g.order() {
            return Err(format!("{x:b} maps outside the graph"));
        }
        if !seen.insert(v) {
            return Err(format!("vertex {v} used twice"));
        }
        for i in 0..n {
            let y = x ^ (1 << i);
            if let Some(w) = phi.get(CubeVertex(y)) {
                if g.is_blue(v, w) {
                    return Err(format!("cube edge {x:b}-{y:b} lands on blue {v}-{w}"));
                }
            }
        }
    }
    Ok(())
}

pub fn map_is_red_cube(g: &ColouredGraph, n: u32, phi: &Embedding) -> Result<(), String> {
    if let Some(x) = (0..1u32 << n).find(|&x| phi.get(CubeVertex(x)).is_none()) {
        return Err(format!("{x:b} is not mapped"));
    }
    partial_map_is_red(g, n, phi)
}

/// Prefix of `x` over the first `len` of its `d` coordinates.
fn head(prefix: u32, d: u32, len: u32) -> u32 {
    prefix >> (d - len)
}

pub fn subcubes_disjoint(a: (u32, u32), b: (u32, u32)) -> bool {
    let len = a.1.min(b.1);
    head(a.0, a.1, len) != head(b.0, b.1, len)
}

pub fn subcubes_adjacent(a: (u32, u32), b: (u32, u32)) -> bool {
    let len = a.1.min(b.1);
    (head(a.0, a.1, len) ^ head(b.0, b.1, len)).count_ones() == 1
}

fn key(x: &InitialSubcube) -> (u32, u32) {
    (x.prefix(), x.codim())
}

pub fn set_size(gamma: f64, n: u32, d: u32) -> usize {
    ((1.0 + gamma) * f64::from(1u32 << (n - d))).ceil() as usize
}

/// Direct check of the defining conditions of a partial assignment.
pub fn assignment_is_valid(
    h: &ColouredGraph,
    pa: &PartialAssignment,
    n: u32,
) -> Result<(), String> {
    let mut owner = vec![None; h.order()];
    for (i, e) in pa.entries.iter().enumerate() {
        let d = e.subcube.codim();
        if d > n || (i > 0 && pa.entries[i - 1].subcube.codim() > d) {
            return Err(format!("entry {i}: co-dimension order"));
        }
        if e.set.len() != set_size(pa.gamma, n, d) {
            return Err(format!("entry {i}: set size {}", e.set.len()));
        }
        for &v in &e.set {
            if v >= h.order() || owner[v].replace(i).is_some() {
                return Err(format!("entry {i}: vertex {v} reused or out of range"));
            }
        }
        for &u in &e.set {
            for &v in &e.set {
                if u < v && h.is_blue(u, v) {
                    return Err(format!("entry {i}: blue edge {u}-{v}"));
                }
            }
        }
        for (j, f) in pa.entries[..i].iter().enumerate() {
            if !subcubes_disjoint(key(&e.subcube), key(&f.subcube)) {
                return Err(format!("entries {j} and {i} overlap"));
            }
            if subcubes_adjacent(key(&e.subcube), key(&f.subcube)) {
                let dj = f.subcube.codim();
                let allowance = pa.gamma * f64::from(1u32 << (n - dj));
                for &v in &e.set {
                    let count = f.set.iter().filter(|&&w| h.is_blue(v, w)).count();
                    if count as f64 * f64::from(dj) > allowance {
                        return Err(format!(
                            "vertex {v} of entry {i} sends {count} blue edges into entry {j}"
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

/// A random valid partial assignment of `Q_n` with blue noise: between
/// adjacent entries each later vertex gets at most the allowed number of
/// blue edges into the earlier set, elsewhere noise is unrestricted.
pub fn random_partial_assignment(
    rng: &mut ChaCha8Rng,
    n: u32,
    gamma: f64,
) -> (ColouredGraph, PartialAssignment) {
    let entries_wanted = rng.random_range(1..=6);
    let mut chosen: Vec<(u32, u32)> = Vec::new();
    let mut d = rng.random_range(1..=n.min(3));
    for _ in 0..entries_wanted {
        let free: Vec<u32> = (0..1u32 << d)
            .filter(|&p| chosen.iter().all(|&c| subcubes_disjoint((p, d), c)))
            .collect();
        if let Some(&p) = free.choose(rng) {
            chosen.push((p, d));
        }
        if d < n && rng.random_bool(0.5) {
            d += 1;
        }
    }
    let mut next = 0;
    let mut entries = Vec::new();
    for &(p, d) in &chosen {
        let size = set_size(gamma, n, d);
        entries.push(AssignmentEntry {
            subcube: InitialSubcube::new(p, d).unwrap(),
            set: (next..next + size).collect(),
        });
        next += size;
    }
    let extra = rng.random_range(0..8);
    let mut g = ColouredGraph::all_red(next + extra);
    for j in 0..entries.len() {
        for i in 0..j {
            let (ci, cj) = (chosen[i], chosen[j]);
            if subcubes_adjacent(ci, cj) {
                let cap =
                    (gamma * f64::from(1u32 << (n - ci.1)) / f64::from(ci.1)).floor() as usize;
                for &v in &entries[j].set {
                    let count = rng.random_range(0..=cap);
                    for &w in entries[i].set.choose_multiple(rng, count) {
                        g.set_blue(v, w).unwrap();
                    }
                }
            } else {
                for &v in &entries[j].set {
                    for &w in &entries[i].set {
                        if rng.random_bool(0.2) {
                            g.set_blue(v, w).unwrap();
                        }
                    }
                }
            }
        }
    }
    for v in next..next + extra {
        for w in 0..v {
            if rng.random_bool(0.3) {
                g.set_blue(v, w).unwrap();
            }
        }
    }
    (g, PartialAssignment { gamma, entries })
}

/// Union-find over red edges; sizes of the red components.
pub fn red_component_sizes(g: &ColouredGraph) -> Vec<usize> {
    let n = g.order();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for u in 0..n {
        for v in u + 1..n {
            if !g.is_blue(u, v) {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut sizes = std::collections::HashMap::new();
    for v in 0..n {
        *sizes.entry(find(&mut parent, v)).or_insert(0usize) += 1;
    }
    sizes.into_values().collect()
}

/// Proper 2-colouring of the blue graph by breadth-first search, if any.
pub fn blue_two_colouring(g: &ColouredGraph) -> Option<Vec<u8>> {
    let n = g.order();
    let mut side = vec![u8::MAX; n];
    for root in 0..n {
        if side[root] != u8::MAX {
            continue;
        }
        side[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if v != u && g.is_blue(u, v) {
                    if side[v] == u8::MAX {
                        side[v] = 1 - side[u];
                        queue.push_back(v);
                    } else if side[v] == side[u] {
                        return None;
                    }
                }
            }
        }
    }
    Some(side)
}

/// Triple loop over all vertex triples.
pub fn has_blue_triangle(g: &ColouredGraph) -> bool {
    let n = g.order();
    (0..n).any(|a| {
        (a + 1..n)
            .any(|b| g.is_blue(a, b) && (b + 1..n).any(|c| g.is_blue(a, c) && g.is_blue(b, c)))
    })
}
