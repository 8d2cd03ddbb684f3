use std::path::PathBuf;
use std::process::{Command, Output};

fn fractops(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractops"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fractops-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf29ce484222325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x100000001b3)
    })
}

#[test]
fn tops_of_square_corner() {
    let o = fractops(&["tops", "square-cts", "--point", "1,1", "--depth", "8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "22222222");
}

#[test]
fn vertex_has_one_address() {
    let o = fractops(&[
        "addresses",
        "tri:0.4,0.6,0.475",
        "--point",
        "0,0",
        "--depth",
        "8",
        "--size",
        "256x256",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "33333333");
}

#[test]
fn refinement_verdicts() {
    let disc = fractops(&[
        "diagnose",
        "--from",
        "fern",
        "--to",
        "square-disc",
        "--refinement",
    ]);
    assert!(disc.status.success());
    assert!(stdout(&disc).starts_with("Violation"), "{}", stdout(&disc));
    let cts = fractops(&[
        "diagnose",
        "--from",
        "fern",
        "--to",
        "square-cts",
        "--refinement",
        "--size",
        "256x256",
    ]);
    assert_eq!(stdout(&cts).trim(), "ConsistentWithRefinement");
}

#[test]
fn continuity_table_has_five_rows() {
    let o = fractops(&[
        "diagnose",
        "--from",
        "fern",
        "--to",
        "fern",
        "--continuity",
        "--size",
        "128x128",
        "--samples",
        "500",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn area_probe_prints_ratio() {
    let o = fractops(&[
        "diagnose",
        "--from",
        "tri:0.5,0.5,0.5",
        "--to",
        "tri:0.5,0.5,0.5",
        "--area",
        "0,0,0.5,0.5",
        "--size",
        "128x128",
        "--samples",
        "50000",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.starts_with("ratio")));
}

#[test]
fn deterministic_render_ignores_workers() {
    let a = scratch("det1.ppm");
    let b = scratch("det3.ppm");
    for (out, w) in [(&a, "1"), (&b, "3")] {
        let o = fractops(&[
            "render",
            "fern",
            "--out",
            out.to_str().unwrap(),
            "--size",
            "200x150",
            "--workers",
            w,
        ]);
        assert!(o.status.success());
    }
    let bytes = std::fs::read(&a).unwrap();
    assert!(bytes.starts_with(b"P6\n200 150\n255\n"));
    assert_eq!(bytes, std::fs::read(&b).unwrap());
}

#[test]
fn chaos_render_matches_golden() {
    let out = scratch("chaos.ppm");
    let args = [
        "render",
        "fern",
        "--out",
        out.to_str().unwrap(),
        "--size",
        "128x128",
        "--method",
        "chaos",
    ];
    let o = fractops(&[&args[..], &["--iters", "1000000", "--seed", "1"]].concat());
    assert!(o.status.success());
    let bytes = std::fs::read(&out).unwrap();
    // golden from the first run of this command
    assert_eq!(format!("{:016x}", fnv1a(&bytes)), GOLDEN_CHAOS);
}

const GOLDEN_CHAOS: &str = "a9ae93500cd895b6";

#[test]
fn transform_writes_picture_and_coverage() {
    let input = scratch("in.ppm");
    let (w, h) = (64usize, 64usize);
    let mut bytes = format!("P6\n{w} {h}\n255\n").into_bytes();
    for j in 0..h {
        for i in 0..w {
            bytes.extend_from_slice(&[(4 * i) as u8, (4 * j) as u8, 128]);
        }
    }
    std::fs::write(&input, &bytes).unwrap();
    for method in ["det", "steal"] {
        let out = scratch(&format!("out-{method}.ppm"));
        let o = fractops(&[
            "transform",
            "--from",
            "fern",
            "--to",
            "square-cts",
            "--picture",
            input.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--method",
            method,
            "--size",
            "96x96",
            "--iters",
            "500000",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(std::fs::read(&out)
            .unwrap()
            .starts_with(b"P6\n96 96\n255\n"));
        assert!(std::fs::read(out.with_extension("coverage.pgm"))
            .unwrap()
            .starts_with(b"P5\n96 96\n255\n"));
    }
}

#[test]
fn config_file_is_accepted() {
    let cfg = scratch("sierpinski.ifs");
    std::fs::write(
        &cfg,
        "name = sierpinski\nmap = 0.5 0 0 0 0.5 0\nmap = 0.5 0 0.5 0 0.5 0\nmap = 0.5 0 0.25 0 0.5 0.5\nviewport = 0 0 1 1\n",
    )
    .unwrap();
    let o = fractops(&[
        "tops",
        cfg.to_str().unwrap(),
        "--point",
        "0,0",
        "--depth",
        "5",
        "--size",
        "64x64",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "11111");
}

#[test]
fn gallery_lists_builtins() {
    let o = fractops(&["gallery"]);
    let text = stdout(&o);
    for name in [
        "fern",
        "square-cts",
        "square-disc",
        "dragon:",
        "tri:",
        "sierpinski:",
    ] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(fractops(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        fractops(&["tops", "fern", "--depth", "3"]).status.code(),
        Some(1)
    );
    assert_eq!(
        fractops(&["tops", "no-such-ifs", "--point", "0,0", "--depth", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        fractops(&["tops", "fern", "--point", "5,5", "--depth", "3", "--size", "32x32"])
            .status
            .code(),
        Some(2)
    );
    let missing = scratch("missing.ppm");
    let o = fractops(&[
        "transform",
        "--from",
        "fern",
        "--to",
        "fern",
        "--picture",
        missing.to_str().unwrap(),
        "--out",
        "/dev/null",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(fractops(&["--help"]).status.code(), Some(0));
}
