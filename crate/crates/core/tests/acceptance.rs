//! One pass/fail line per acceptance criterion. Runs sequentially on one
//! worker so the timings mean something; exits non-zero if any line fails.

use std::cmp::Ordering;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fractal_tops::attractor::{
    phi_eval, render_adaptive, render_chaos, render_deterministic, DEFAULT_BURN_IN,
};
use fractal_tops::diagnostics::{area_probe, continuity_probe, refinement_check, Verdict};
use fractal_tops::gallery::{
    by_name, dragon_ifs, fern, mask_picture, square_cts, square_disc, triangle_family, TriangleSpec,
};
use fractal_tops::hausdorff::hausdorff_pixels;
use fractal_tops::tops::{
    build_partition, enumerate_addresses, tops_orbit, tops_step, DEFAULT_MAX_BRANCHES,
};
use fractal_tops::transform::{color_steal, transform_point, StealOptions};
use fractal_tops::{
    code_metric, tops_compare, AddressPrefix, AffineMap2, Ifs, PixelGrid, Point2, RasterPicture,
    SplitMix64, Viewport,
};

const SIZE: usize = 512;

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

fn grid(ifs: &Ifs) -> PixelGrid {
    PixelGrid::square(SIZE, ifs.viewport()).unwrap()
}

fn tri(a: f64, b: f64, c: f64) -> Ifs {
    triangle_family(&TriangleSpec::canonical(a, b, c).unwrap()).unwrap()
}

fn word(head: &[u8], tail: u8, len: usize) -> AddressPrefix {
    let mut s = head.to_vec();
    s.resize(len, tail);
    AddressPrefix::from_symbols(s)
}

/// Fixed point of `f` by Cramer's rule on `(I - A) x = t`.
fn solve_fixed(f: &AffineMap2) -> Point2 {
    let (m11, m12, m21, m22) = (1.0 - f.a, -f.b, -f.d, 1.0 - f.e);
    let det = m11 * m22 - m12 * m21;
    Point2::new((f.c * m22 - m12 * f.l) / det, (m11 * f.l - m21 * f.c) / det)
}

fn c1_dragon_fixed_points() -> Outcome {
    let d = dragon_ifs(0.5, 0.5).unwrap();
    let tol = 1e-9;
    let mut worst: f64 = 0.0;
    for (s, want) in [(1u8, Point2::new(-1.0, -1.0)), (2, Point2::new(1.0, 1.0))] {
        let p = phi_eval(&d, &AddressPrefix::repeat(s, 60), None).point;
        worst = worst.max((p.x - want.x).abs()).max((p.y - want.y).abs());
    }
    outcome(
        worst <= tol,
        format!("max coordinate error {worst:.3e} (tol {tol:.0e})"),
    )
}

fn c2_fern_junction() -> Outcome {
    let f = fern();
    let depth = 200;
    let cases = [(1u8, 2u8), (2, 1), (3, 2), (4, 2)];
    let mut pts = Vec::new();
    let mut oracle_err: f64 = 0.0;
    for (p, t) in cases {
        let v = phi_eval(&f, &word(&[p], t, depth), None).point;
        let oracle = f.map(p).apply(solve_fixed(f.map(t)));
        oracle_err = oracle_err.max(v.distance(oracle));
        pts.push(v);
    }
    let mut spread: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            spread = spread.max(pts[i].distance(pts[j]));
        }
    }
    outcome(
        spread <= 5e-3 && oracle_err <= 1e-9,
        format!("pairwise max {spread:.3e} (tol 5e-3), oracle error {oracle_err:.3e} (tol 1e-9)"),
    )
}

fn c3_hausdorff_decay() -> Outcome {
    let t = tri(0.5, 0.5, 0.5);
    let g = grid(&t);
    let reference = render_deterministic(&t, 12, &g).unwrap();
    let diam = t.viewport().diameter();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 4..=10 {
        let h = hausdorff_pixels(&render_deterministic(&t, k, &g).unwrap(), &reference).unwrap();
        let bound = diam * 0.5f64.powi(k as i32);
        pass &= h <= bound;
        parts.push(format!("K={k}: {h:.4}<={bound:.4}"));
    }
    outcome(pass, parts.join(", "))
}

fn c4_chaos_vs_deterministic() -> Outcome {
    let names = [
        "fern",
        "square-cts",
        "square-cts-table",
        "square-disc",
        "dragon:0.5,0.5",
        "tri:0.5,0.5,0.5",
        "sierpinski:0.5,0.5,0.5",
    ];
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut failing = Vec::new();
    for name in names {
        let ifs = by_name(name).unwrap();
        let g = grid(&ifs);
        let det = render_adaptive(&ifs, &g, 1).unwrap().mask;
        let chaos = render_chaos(&ifs, 10_000_000, 1, &g, DEFAULT_BURN_IN);
        let h = hausdorff_pixels(&det, &chaos).unwrap() / g.pitch();
        worst = worst.max(h);
        if h > 2.0 {
            pass = false;
            failing.push(name);
        }
    }
    outcome(
        pass,
        format!(
            "worst {worst:.3} pitches over {} IFSs (tol 2) {failing:?}",
            names.len()
        ),
    )
}

fn c5_identity_transformation() -> Outcome {
    let f = fern();
    let g = grid(&f);
    let render = render_adaptive(&f, &g, 1).unwrap();
    let vp = f.viewport();
    let input = RasterPicture::from_fn(g, |p| {
        let u = (p.x - vp.min.x) / vp.width();
        let v = (p.y - vp.min.y) / vp.height();
        [
            (255.0 * u) as u8,
            (255.0 * v) as u8,
            (255.0 * (1.0 - u * v)) as u8,
        ]
    });
    let input = mask_picture(&input, &render.mask).unwrap();
    let opts = StealOptions {
        iterations: 10_000_000,
        seed: 1,
        ..StealOptions::default()
    };
    let (out, report) = color_steal(&f, &f, &input, &render.mask, &opts).unwrap();
    let total = render.mask.count();
    let same = render
        .mask
        .iter_set()
        .filter(|&(i, j)| out.get(i, j).is_some() && out.get(i, j) == input.get(i, j))
        .count();
    let frac = same as f64 / total as f64;
    outcome(
        frac >= 0.99,
        format!(
            "{same}/{total} = {frac:.4} (tol 0.99), coverage {:.4}",
            report.coverage_fraction
        ),
    )
}

fn c6_continuity_dichotomy() -> Outcome {
    let f = fern();
    let g = grid(&f);
    let part = build_partition(&f, &g, 1).unwrap();
    let scales: Vec<f64> = [4.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|k| k * g.pitch())
        .collect();
    let cts = continuity_probe(&part, &square_cts(), &scales, 20_000, 30, 1, 1).unwrap();
    let disc = continuity_probe(&part, &square_disc(), &scales, 20_000, 30, 1, 1).unwrap();
    let (small, large) = (cts[0].max_displacement, cts[3].max_displacement);
    let cts_ok = small < 0.5 * large;
    let disc_min = disc
        .iter()
        .map(|r| r.max_displacement)
        .fold(f64::INFINITY, f64::min);
    let disc_ok = disc_min >= 0.1;
    outcome(
        cts_ok && disc_ok,
        format!(
            "cts 4px {small:.4} vs 32px {large:.4} (ratio {:.3}, need < 0.5) {}; disc min {disc_min:.4} (need >= 0.1) {}",
            small / large,
            if cts_ok { "ok" } else { "FAIL" },
            if disc_ok { "ok" } else { "FAIL" }
        ),
    )
}

fn c7_refinement_verdicts() -> Outcome {
    let f = fern();
    let g = grid(&f);
    let cts = refinement_check(&f, &square_cts(), 10, 1000, &g, 1, 1).unwrap();
    let disc = refinement_check(&f, &square_disc(), 10, 1000, &g, 1, 1).unwrap();
    let pass = cts == Verdict::ConsistentWithRefinement && disc.is_violation();
    outcome(pass, format!("cts: {cts}; disc: {disc}"))
}

fn c8_round_trip() -> Outcome {
    let tf = tri(0.525, 0.525, 0.525);
    let tg = tri(0.475, 0.475, 0.475);
    let pf = build_partition(&tf, &grid(&tf), 1).unwrap();
    let pg = build_partition(&tg, &grid(&tg), 1).unwrap();
    let mut rng = SplitMix64::new(1);
    let (mut ok, mut counted, mut exempt) = (0, 0, 0);
    for _ in 0..10_000 {
        let x = pf.sample(&mut rng);
        let y = transform_point(&pf, &tg, x, 40).unwrap();
        if pf.on_boundary(x) || pg.on_boundary(y.point) {
            exempt += 1;
            continue;
        }
        counted += 1;
        if let Ok(z) = transform_point(&pg, &tf, y.point, 40) {
            if z.point.distance(x) <= 2.0 * pf.grid().pitch() + y.radius + z.radius {
                ok += 1;
            }
        }
    }
    let frac = ok as f64 / counted as f64;
    outcome(
        frac >= 0.99,
        format!("{ok}/{counted} = {frac:.4} (tol 0.99), {exempt} boundary-exempt"),
    )
}

fn c9_area_preservation() -> Outcome {
    let tf = tri(0.525, 0.525, 0.525);
    let tg = tri(0.475, 0.475, 0.475);
    let pf = build_partition(&tf, &grid(&tf), 1).unwrap();
    let region = Viewport::new(0.0, 0.0, 0.5, 0.5).unwrap();
    let r = area_probe(&pf, &tg, region, 1_000_000, 1, 40, 1).unwrap();
    let dev = (r.ratio() - 1.0).abs();
    outcome(
        dev <= 0.02,
        format!(
            "area_f {:.5}, area_g {:.5}, ratio {:.4} ± {:.4} (tol 2%)",
            r.area_f.area,
            r.area_g.area,
            r.ratio(),
            r.ratio_uncertainty()
        ),
    )
}

fn c10_boundary_address() -> Outcome {
    let triples = [(0.5, 0.5, 0.5), (0.525, 0.525, 0.525), (0.4, 0.6, 0.475)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, b, c) in triples {
        let t = tri(a, b, c);
        let part = build_partition(&t, &grid(&t), 1).unwrap();
        let addrs = enumerate_addresses(
            &t,
            part.images(),
            Point2::new(0.0, 0.0),
            8,
            DEFAULT_MAX_BRANCHES,
        )
        .unwrap();
        let got: Vec<String> = addrs.iter().map(|w| w.to_string()).collect();
        pass &= got == ["33333333"];
        parts.push(format!("({a},{b},{c}) -> {got:?}"));
    }
    outcome(pass, parts.join(", "))
}

fn c11_conjugacy() -> Outcome {
    let f = square_cts();
    let part = build_partition(&f, &grid(&f), 1).unwrap();
    let mut rng = SplitMix64::new(1);
    let (mut ok, mut counted, mut drawn) = (0, 0, 0);
    while counted < 1000 && drawn < 1_000_000 {
        drawn += 1;
        let x = part.sample(&mut rng);
        if part.on_boundary(x) {
            continue;
        }
        let Ok(step) = tops_step(&part, x) else {
            continue;
        };
        counted += 1;
        let (Ok(a), Ok(b)) = (tops_orbit(&part, x, 12), tops_orbit(&part, step.next, 11)) else {
            continue;
        };
        if a.complete && b.complete && a.prefix.shift() == b.prefix {
            ok += 1;
        }
    }
    let frac = ok as f64 / counted.max(1) as f64;
    outcome(
        counted == 1000 && frac >= 0.99,
        format!("{ok}/{counted} = {frac:.4} (tol 0.99), {drawn} drawn"),
    )
}

fn c12_order_laws() -> Outcome {
    let mut words = vec![AddressPrefix::empty()];
    let mut layer = vec![AddressPrefix::empty()];
    for _ in 0..6 {
        layer = layer
            .iter()
            .flat_map(|w| {
                (1..=4u8).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
        words.extend(layer.iter().cloned());
    }
    let n = words.len();
    let padded = |w: &AddressPrefix| (0..6).map(|i| w.padded(i)).collect::<Vec<u8>>();
    let keys: Vec<Vec<u8>> = words.iter().map(padded).collect();

    // total preorder on prefixes: reflexive, antisymmetric up to padding,
    // and consistent with a sort, which gives transitivity
    let mut bad = 0usize;
    for i in 0..n {
        for j in 0..n {
            let c = tops_compare(&words[i], &words[j]);
            if c != tops_compare(&words[j], &words[i]).reverse()
                || (c == Ordering::Equal) != (keys[i] == keys[j])
            {
                bad += 1;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| tops_compare(&words[a], &words[b]));
    for i in 0..n {
        for j in i + 1..n {
            if tops_compare(&words[order[i]], &words[order[j]]) == Ordering::Greater {
                bad += 1;
            }
        }
    }
    let top_is_ones = keys[order[n - 1]] == [1; 6];

    // metric axioms on every pair and every triple, exact in units of 2^-6
    let mut dist = vec![0u8; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = code_metric(&words[i], &words[j]);
            let scaled = d * 64.0;
            if scaled != scaled.round() || scaled > 32.0 {
                bad += 1;
            }
            dist[i * n + j] = scaled as u8;
            if (d == 0.0) != (keys[i] == keys[j]) {
                bad += 1;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if dist[i * n + j] != dist[j * n + i] {
                bad += 1;
            }
        }
    }
    // prefixes ending in 1 pad to the same sequence as the shorter word; once
    // their distance rows match, triples over canonical prefixes (no trailing
    // 1) cover every triple, and symmetry lets r run above p only
    let canonical: Vec<usize> = (0..n)
        .filter(|&i| words[i].symbols().last() != Some(&1))
        .collect();
    for i in 0..n {
        let mut stripped = words[i].symbols().to_vec();
        while stripped.last() == Some(&1) {
            stripped.pop();
        }
        let c = words
            .iter()
            .position(|w| w.symbols() == stripped.as_slice())
            .expect("shorter word present");
        if dist[i * n..(i + 1) * n] != dist[c * n..(c + 1) * n] {
            bad += 1;
        }
    }
    let m = canonical.len();
    let sub: Vec<u8> = canonical
        .iter()
        .flat_map(|&i| canonical.iter().map(move |&j| (i, j)))
        .map(|(i, j)| dist[i * n + j])
        .collect();
    let mut triangle = 0usize;
    for p in 0..m {
        for q in 0..m {
            let dpq = sub[p * m + q];
            let row_p = &sub[p * m + p + 1..(p + 1) * m];
            let row_q = &sub[q * m + p + 1..(q + 1) * m];
            // sums stay <= 64, so wrapping never wraps
            let hit = row_p.iter().zip(row_q).fold(0u8, |acc, (&pr, &qr)| {
                acc | u8::from(pr > dpq.wrapping_add(qr))
            });
            triangle += usize::from(hit);
        }
    }
    bad += triangle;
    outcome(
        bad == 0 && top_is_ones,
        format!("{n} prefixes ({m} padding classes), all pairs and triples, {bad} violations"),
    )
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        (
            1,
            "dragon fixed points",
            Duration::from_secs(1),
            c1_dragon_fixed_points,
        ),
        (2, "fern junction", Duration::from_secs(1), c2_fern_junction),
        (
            3,
            "hausdorff decay",
            Duration::from_secs(30),
            c3_hausdorff_decay,
        ),
        (
            4,
            "chaos vs deterministic",
            Duration::from_secs(60),
            c4_chaos_vs_deterministic,
        ),
        (
            5,
            "identity transformation",
            Duration::from_secs(60),
            c5_identity_transformation,
        ),
        (
            6,
            "continuity dichotomy",
            Duration::from_secs(30),
            c6_continuity_dichotomy,
        ),
        (
            7,
            "refinement verdicts",
            Duration::from_secs(30),
            c7_refinement_verdicts,
        ),
        (
            8,
            "homeomorphism round trip",
            Duration::from_secs(60),
            c8_round_trip,
        ),
        (
            9,
            "area preservation",
            Duration::from_secs(30),
            c9_area_preservation,
        ),
        (
            10,
            "boundary address",
            Duration::from_secs(10),
            c10_boundary_address,
        ),
        (11, "conjugacy", Duration::from_secs(10), c11_conjugacy),
        (12, "order laws", Duration::from_secs(10), c12_order_laws),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let in_time = took <= limit;
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] {id:>2} {name}: {} [{took:.2?} / {limit:?}{}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            if in_time { "" } else { " over time" }
        );
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
