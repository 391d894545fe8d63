//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Built with `harness = false`; run with `cargo test -p tricube --test acceptance`.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tricube::decompose::{decompose, verify_decomposition, DecompositionParams};
use tricube::dense::{embed_partial_assignment, extend_or_clean, Extension, PartialAssignment};
use tricube::generate::{random_bipartite, random_triangle_free, target_order, two_cliques_linked};
use tricube::graph::{
    lower_bound_coloring, red_components_too_small, verify_partial_embedding, verify_red_embedding,
};
use tricube::hypercube::{bandwidth_order, cube_vertices, CubeVertex};
use tricube::oracle::{contains_red_cube, exhaustive_ramsey, Enumeration, RamseyVerdict};
use tricube::snake::{snake_embed, ForbiddenSets, Snake, SnakeMode};
use tricube::solver::{solve, SolveCase, SolverParams};
use tricube::ColouredGraph;

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("exact small Ramsey values", criterion_1),
        ("lower-bound colourings, n = 1..14", criterion_2),
        (
            "two 512-cliques with a red K_504,504 hold Q_10",
            criterion_3,
        ),
        ("bandwidth order stretch, n = 1..12", criterion_4),
        ("partial assignments embed", criterion_5),
        ("extend-or-clean dichotomy", criterion_6),
        ("decomposition certificates", criterion_7),
        ("end-to-end solve on curated families", criterion_8),
        ("oracle agrees with solve", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {verdict} {name}: {} [{:.2?}]",
            i + 1,
            result.detail,
            start.elapsed()
        );
        if !result.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

/// Tries every injection of the 4-cycle into the red graph.
fn has_red_square(g: &ColouredGraph) -> bool {
    let n = g.order();
    let red = |u: usize, v: usize| u != v && !g.is_blue(u, v);
    (0..n).any(|a| {
        (0..n).any(|b| {
            red(a, b)
                && (0..n).any(|c| {
                    c != a
                        && red(b, c)
                        && (0..n).any(|d| d != a && d != b && red(c, d) && red(d, a))
                })
        })
    })
}

fn smallest_holding(
    n: u32,
    orders: std::ops::RangeInclusive<usize>,
    mode: Enumeration,
) -> (Option<usize>, Vec<RamseyVerdict>) {
    let mut verdicts = Vec::new();
    for order in orders {
        let v = exhaustive_ramsey(n, order, mode).expect("within the enumeration limit");
        let holds = v.holds;
        verdicts.push(v);
        if holds {
            return (Some(order), verdicts);
        }
    }
    (None, verdicts)
}

fn criterion_1() -> Outcome {
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let mut notes = Vec::new();
    let mut pass = true;

    let start = Instant::now();
    let (r1, v1) = single.install(|| smallest_holding(1, 1..=3, Enumeration::Plain));
    let t1 = start.elapsed();
    pass &= r1 == Some(3) && t1 < Duration::from_secs(1);
    notes.push(format!("r(K3,Q1) = {r1:?} in {t1:.2?}"));
    for v in &v1 {
        if let Some(w) = &v.witness {
            // A red edge is a red Q_1, so every edge of the witness is blue.
            let all_blue = (0..w.order()).all(|u| (u + 1..w.order()).all(|v| w.is_blue(u, v)));
            pass &= !has_blue_triangle(w) && all_blue && w.order() == v.order;
        }
    }

    let start = Instant::now();
    let (r2, v2) = single.install(|| smallest_holding(2, 6..=7, Enumeration::Plain));
    let t2 = start.elapsed();
    pass &= r2 == Some(7) && t2 < Duration::from_secs(60);
    notes.push(format!("r(K3,Q2) = {r2:?} in {t2:.2?}"));
    let below = &v2[0];
    let witness_ok = below
        .witness
        .as_ref()
        .is_some_and(|w| w.order() == 6 && !has_blue_triangle(w) && !has_red_square(w));
    let lower = lower_bound_coloring(2).unwrap();
    let lower_ok = !has_blue_triangle(&lower) && !has_red_square(&lower);
    pass &= witness_ok && lower_ok;
    notes.push(format!(
        "N=6 witness checked: {witness_ok}, K_3,3 colouring checked: {lower_ok}"
    ));
    pass &= r1 == Some((1 << 2) - 1) && r2 == Some((1 << 3) - 1);

    let canonical = [(1, 2), (1, 3), (2, 6), (2, 7)].iter().all(|&(n, order)| {
        let plain = exhaustive_ramsey(n, order, Enumeration::Plain)
            .unwrap()
            .holds;
        exhaustive_ramsey(n, order, Enumeration::Canonical)
            .unwrap()
            .holds
            == plain
    });
    pass &= canonical;
    notes.push(format!(
        "canonical mode agrees: {canonical}; both match 2^(n+1) - 1"
    ));
    outcome(pass, notes.join("; "))
}

fn criterion_2() -> Outcome {
    let mut library_time = Duration::ZERO;
    let mut bad = Vec::new();
    for n in 1..=14u32 {
        let start = Instant::now();
        let g = lower_bound_coloring(n).unwrap();
        let ok = g.is_blue_triangle_free() && red_components_too_small(&g, n);
        library_time += start.elapsed();
        // Independent recount: a proper 2-colouring of the blue graph rules
        // out blue triangles, and no red component reaches 2^n vertices.
        let bipartite = blue_two_colouring(&g).is_some();
        let small = red_component_sizes(&g).iter().all(|&s| s < 1 << n);
        if !(ok && bipartite && small && g.order() == (1 << (n + 1)) - 2) {
            bad.push(n);
        }
    }
    let pass = bad.is_empty() && library_time < Duration::from_secs(30);
    outcome(
        pass,
        format!("failures at n = {bad:?}; library checks took {library_time:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let n = 10;
    let s = 2 * binom(10, 5) as usize;
    let g = two_cliques_linked(512, s);
    let start = Instant::now();
    let snake = Snake::discover(&g, vec![(0..512).collect(), (512..1024).collect()], s);
    let q: Vec<CubeVertex> = cube_vertices(n).collect();
    let result = snake_embed(&g, &snake, &q, &ForbiddenSets::new(), n, SnakeMode::Relaxed);
    let elapsed = start.elapsed();
    match result {
        Ok(placed) => {
            let library = verify_red_embedding(&g, n, &placed.embedding);
            let direct = map_is_red_cube(&g, n, &placed.embedding);
            outcome(
                library.is_ok() && direct.is_ok() && elapsed < Duration::from_secs(10),
                format!(
                    "s = {s}, route {:?}, verifier {library:?}, direct check {direct:?}, {elapsed:.2?}",
                    placed.route
                ),
            )
        }
        Err(e) => outcome(false, format!("snake_embed failed: {e}")),
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut worst = Vec::new();
    let mut pass = true;
    for n in 1..=12u32 {
        let order = bandwidth_order(cube_vertices(n));
        let mut position = vec![usize::MAX; 1 << n];
        for (i, x) in order.iter().enumerate() {
            position[x.0 as usize] = i;
        }
        let permutation = order.len() == 1 << n && position.iter().all(|&p| p != usize::MAX);
        let bound = 2 * binom(u64::from(n), u64::from(n / 2)) as usize;
        let mut stretch = 0;
        for x in 0..1usize << n {
            for i in 0..n {
                let y = x ^ (1 << i);
                stretch = stretch.max(position[x].abs_diff(position[y]));
            }
        }
        pass &= permutation && stretch <= bound;
        worst.push(format!("{n}:{stretch}/{bound}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    outcome(pass, format!("stretch/bound {}", worst.join(" ")))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let gammas = [0.1, 0.25, 0.5];
    let mut ok = 0;
    let mut problems = Vec::new();
    for i in 0..100 {
        let n = rng.random_range(2..=8);
        let gamma = gammas[i % 3];
        let (g, pa) = random_partial_assignment(&mut rng, n, gamma);
        if let Err(e) = assignment_is_valid(&g, &pa, n) {
            problems.push(format!("generator produced an invalid instance: {e}"));
            continue;
        }
        match embed_partial_assignment(&g, &pa, n) {
            Ok(phi) => {
                let covered: usize = pa
                    .entries
                    .iter()
                    .map(|e| 1usize << (n - e.subcube.codim()))
                    .sum();
                let direct = partial_map_is_red(&g, n, &phi);
                let inside = pa.entries.iter().all(|e| {
                    e.subcube
                        .word_range(n)
                        .unwrap()
                        .all(|x| phi.get(CubeVertex(x)).is_some_and(|v| e.set.contains(&v)))
                });
                if verify_partial_embedding(&g, &phi).is_ok()
                    && direct.is_ok()
                    && inside
                    && phi.defined_count() == covered
                {
                    ok += 1;
                } else {
                    problems.push(format!("instance {i}: {direct:?}, inside {inside}"));
                }
            }
            Err(e) => problems.push(format!("instance {i}: {e}")),
        }
    }
    outcome(
        ok == 100,
        format!("{ok}/100 embedded and verified {}", problems.join("; ")),
    )
}

/// A triangle-free graph, a partial assignment grown by the library from
/// scratch, and an active set of unused vertices.
fn dichotomy_instance(
    rng: &mut ChaCha8Rng,
) -> Option<(ColouredGraph, PartialAssignment, Vec<usize>, u32, u32, u32)> {
    let n = rng.random_range(4..=8u32);
    let gamma = [0.1, 0.25, 0.5][rng.random_range(0..3)];
    let order = target_order(n, 0.5);
    let cap = 1usize << rng.random_range(n - 3..=n);
    let h = random_triangle_free(order, rng.random_range(0.01..0.3), cap, rng.random());
    let mut pa = PartialAssignment::new(gamma);
    let mut active: Vec<usize> = (0..order).collect();
    let steps = rng.random_range(0..4);
    for _ in 0..steps {
        let low = pa.entries.last().map_or(1, |e| e.subcube.codim().max(1));
        let b = rng.random_range(low..n);
        match extend_or_clean(&h, &pa, &active, 1, b, n) {
            Ok(Extension::Extended(next)) => {
                let added = next.entries.last().unwrap().set.clone();
                active.retain(|v| !added.contains(v));
                pa = next;
            }
            _ => break,
        }
    }
    let low = pa.entries.last().map_or(1, |e| e.subcube.codim().max(1));
    if low >= n
        || pa
            .entries
            .iter()
            .map(|e| 1usize << (n - e.subcube.codim()))
            .sum::<usize>()
            == 1 << n
    {
        return None;
    }
    // Largest a with every assigned vertex sending at most 2^(n-a) blue
    // edges into the active set.
    let worst = pa
        .entries
        .iter()
        .flat_map(|e| e.set.iter())
        .map(|&v| active.iter().filter(|&&w| h.is_blue(v, w)).count())
        .max()
        .unwrap_or(0);
    let a_max = (1..n).rev().find(|&a| worst <= 1 << (n - a))?;
    let a = rng.random_range(1..=a_max);
    let b = rng.random_range(low.max(a)..n);
    Some((h, pa, active, a, b, n))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut extended, mut cleaned, mut bad) = (0, 0, Vec::new());
    let mut attempts = 0;
    while extended + cleaned + bad.len() < 100 && attempts < 10_000 {
        attempts += 1;
        let Some((h, pa, active, a, b, n)) = dichotomy_instance(&mut rng) else {
            continue;
        };
        match extend_or_clean(&h, &pa, &active, a, b, n) {
            Ok(Extension::Extended(next)) => {
                let last = next.entries.last().unwrap();
                let fresh =
                    last.subcube.codim() == b && last.set.iter().all(|v| active.contains(v));
                let valid = assignment_is_valid(&h, &next, n);
                if valid.is_ok() && fresh && next.entries[..pa.len()] == pa.entries[..] {
                    extended += 1;
                } else {
                    bad.push(format!("extension invalid: {valid:?}"));
                }
            }
            Ok(Extension::Cleaned(c)) => {
                let degree_bound = 1usize << (n - b + 1);
                let worst = (0..h.order())
                    .map(|u| c.iter().filter(|&&w| h.is_blue(u, w)).count())
                    .max()
                    .unwrap_or(0);
                let size_bound = active.len() as f64
                    - f64::from(b * b) / pa.gamma * f64::from(1u32 << (n - a + 1));
                let subset = c.iter().all(|v| active.contains(v));
                if worst < degree_bound && c.len() as f64 >= size_bound && subset {
                    cleaned += 1;
                } else {
                    bad.push(format!(
                        "cleaned set: max degree {worst} vs {degree_bound}, size {} vs {size_bound:.1}",
                        c.len()
                    ));
                }
            }
            Err(e) => bad.push(format!("error: {e}")),
        }
    }
    let total = extended + cleaned;
    outcome(
        total == 100 && bad.is_empty(),
        format!(
            "{extended} extended + {cleaned} cleaned of 100 verified {}",
            bad.join("; ")
        ),
    )
}

/// The 50 decomposition instances: `(label, graph, n)`.
fn decomposition_instances() -> Vec<(String, ColouredGraph, u32)> {
    let mut out = Vec::new();
    for i in 0..50u64 {
        let n = 5 + (i % 6) as u32;
        let order = if i >= 44 {
            1usize << 12
        } else {
            target_order(n, 0.1)
        };
        let n = if i >= 44 { 10 } else { n };
        let (label, g) = match (i / 6) % 4 {
            0 => ("bipartite p=0.02", random_bipartite(order, 0.02, i)),
            1 => ("bipartite p=0.9", random_bipartite(order, 0.9, i)),
            2 => (
                "greedy p=0.01",
                random_triangle_free(order, 0.01, usize::MAX, i),
            ),
            _ => (
                "greedy p=0.5 capped",
                random_triangle_free(order, 0.5, 1 << (n - 1), i),
            ),
        };
        out.push((format!("#{i} {label} n={n} N={order}"), g, n));
    }
    out
}

fn criterion_7() -> Outcome {
    let mut ok = 0;
    let mut bipartite = 0;
    let mut problems = Vec::new();
    for (label, g, n) in decomposition_instances() {
        if has_blue_triangle_fast(&g) {
            problems.push(format!("{label}: generator made a blue triangle"));
            continue;
        }
        let params = DecompositionParams::desk(n);
        let d = match decompose(&g, &params) {
            Ok(d) => d,
            Err(e) => {
                problems.push(format!("{label}: {e}"));
                continue;
            }
        };
        let terminated = d.audit.len() <= g.order();
        let certified = verify_decomposition(&g, &d, &params);
        let gap = gap_consequence_holds(&g, &d, params.lambda);
        let partition = partition_holds(&g, &d);
        if terminated && certified.is_ok() && gap && partition {
            ok += 1;
            bipartite += usize::from(label.contains("bipartite"));
        } else {
            problems.push(format!(
                "{label}: {certified:?}, gap {gap}, partition {partition}"
            ));
        }
    }
    outcome(
        ok == 50,
        format!(
            "{ok}/50 verified ({bipartite} bipartite) {}",
            problems.join("; ")
        ),
    )
}

/// Blue triangle test through neighbourhood intersections, fine for the
/// larger instances where the triple loop is too slow.
fn has_blue_triangle_fast(g: &ColouredGraph) -> bool {
    (0..g.order()).any(|u| {
        let nu: Vec<usize> = (0..g.order())
            .filter(|&v| v > u && g.is_blue(u, v))
            .collect();
        nu.iter()
            .enumerate()
            .any(|(i, &v)| nu[i + 1..].iter().any(|&w| g.is_blue(v, w)))
    })
}

/// Every vertex set aside in a round sends fewer than `s / lambda` blue
/// edges into each clique of that round left out of the snake.
fn gap_consequence_holds(
    g: &ColouredGraph,
    d: &tricube::decompose::Decomposition,
    lambda: f64,
) -> bool {
    d.audit.iter().all(|round| {
        round.cliques.iter().enumerate().all(|(c, members)| {
            round.snake_cliques.contains(&c)
                || round.cleaned.iter().all(|&v| {
                    let count = members.iter().filter(|&&w| g.is_blue(v, w)).count();
                    (count as f64) < round.s as f64 / lambda
                })
        })
    })
}

fn partition_holds(g: &ColouredGraph, d: &tricube::decompose::Decomposition) -> bool {
    let mut all: Vec<usize> =
        d.c.iter()
            .chain(d.snakes.iter().flat_map(|s| s.vertices.iter()))
            .copied()
            .collect();
    all.sort_unstable();
    all == (0..g.order()).collect::<Vec<_>>()
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    let families: [(&str, f64, SolveCase); 3] = [
        ("all-red", 1.0, SolveCase::Snakes),
        ("two-clique", 1.0, SolveCase::Snakes),
        ("sparse random", 0.9, SolveCase::Dense),
    ];
    for (family, required, expected_case) in families {
        let (mut tried, mut solved, mut wrong_case, mut undiagnosed) = (0, 0, 0, 0);
        for n in 6..=10u32 {
            let params = SolverParams::desk(n);
            let order = target_order(n, params.epsilon);
            let seeds = if family == "sparse random" {
                0..6
            } else {
                0..1
            };
            for seed in seeds {
                let g = match family {
                    "all-red" => ColouredGraph::all_red(order),
                    "two-clique" => two_cliques_linked(
                        order.div_ceil(2),
                        2 * binom(u64::from(n), u64::from(n / 2)) as usize,
                    ),
                    _ => {
                        let g =
                            random_triangle_free(order, 0.5, 1 << (n - params.schedule.b[0]), seed);
                        assert!(g.max_blue_degree() <= 1 << (n - params.schedule.b[0]));
                        g
                    }
                };
                assert!(g.order() >= order);
                tried += 1;
                match solve(&g, n, &params) {
                    Ok(sol) => {
                        if map_is_red_cube(&g, n, &sol.embedding).is_ok() {
                            solved += 1;
                            wrong_case += usize::from(sol.case != expected_case);
                        } else {
                            pass = false;
                        }
                    }
                    Err(e) => {
                        undiagnosed += usize::from(e.stage().is_empty() || e.is_hypothesis());
                    }
                }
            }
        }
        let rate = solved as f64 / tried as f64;
        pass &= rate >= required && undiagnosed == 0 && wrong_case == 0;
        notes.push(format!(
            "{family} {solved}/{tried} (need {:.0}%, off-case {wrong_case}, undiagnosed {undiagnosed})",
            required * 100.0
        ));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_9() -> Outcome {
    let mut instances: Vec<(String, ColouredGraph, u32)> = Vec::new();
    for n in 2..=4u32 {
        let base = target_order(n, 0.1);
        instances.push((format!("all-red n={n}"), ColouredGraph::all_red(base), n));
        let side = base.div_ceil(2);
        let s = (2 * binom(u64::from(n), u64::from(n / 2)) as usize).min(side);
        instances.push((format!("two-clique n={n}"), two_cliques_linked(side, s), n));
        instances.push((
            format!("lower bound n={n}"),
            lower_bound_coloring(n).unwrap(),
            n,
        ));
    }
    let mut seed = 0u64;
    while instances.len() < 50 {
        let n = 2 + (seed % 3) as u32;
        let order = (target_order(n, 0.1) + (seed as usize * 7) % 20).min(64);
        let g = match seed % 3 {
            0 => random_triangle_free(order, 0.5, 1 << (n - 1), seed),
            1 => random_triangle_free(order, 0.1, usize::MAX, seed),
            _ => random_bipartite(order, 0.3, seed),
        };
        instances.push((format!("random #{seed} n={n} N={order}"), g, n));
        seed += 1;
    }
    let (mut solved, mut confirmed) = (0, 0);
    let mut problems = Vec::new();
    for (label, g, n) in &instances {
        assert!(g.order() <= 64);
        if let Ok(sol) = solve(g, *n, &SolverParams::desk(*n)) {
            solved += 1;
            let direct = map_is_red_cube(g, *n, &sol.embedding);
            let oracle = contains_red_cube(g, *n).unwrap();
            if direct.is_ok() && oracle.is_found() {
                confirmed += 1;
            } else {
                problems.push(format!(
                    "{label}: direct {direct:?}, oracle found {}",
                    oracle.is_found()
                ));
            }
        }
    }
    let lower_absent = (2..=3).all(|n| {
        !contains_red_cube(&lower_bound_coloring(n).unwrap(), n)
            .unwrap()
            .is_found()
    });
    outcome(
        problems.is_empty() && solved > 0 && lower_absent,
        format!(
            "{} instances, solve succeeded on {solved}, oracle confirmed {confirmed}; lower-bound colourings absent: {lower_absent} {}",
            instances.len(),
            problems.join("; ")
        ),
    )
}
