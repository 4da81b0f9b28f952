//! Regenerates the committed files under `fixtures/`.
//!
//! ```text
//! cargo run -p fedscreen --example make_fixtures [OUT_DIR]
//! ```
//!
//! Output is a pure function of the constants below, so rerunning leaves
//! the committed bytes unchanged.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fedscreen::landmarks::{format_record, LandmarkSet, Point};
use fedscreen::seed;
use rand::seq::SliceRandom;
use rand::Rng;

const BEHAVIORAL_ROWS: usize = 705;
const BEHAVIORAL_WITH_BLANKS: usize = 218;
const FACES_PER_CLASS: usize = 1470;
const MALFORMED_ASD: usize = 130;
const MALFORMED_NON_ASD: usize = 133;

fn main() -> fedscreen::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    std::fs::create_dir_all(&out).map_err(|e| fedscreen::Error::InvalidArgument(e.to_string()))?;
    let write = |name: &str, text: String| {
        fedscreen::data::write_atomic(&out.join(name), text.as_bytes())?;
        println!("wrote {}", out.join(name).display());
        Ok::<_, fedscreen::Error>(())
    };
    write("behavioral_705.csv", behavioral())?;
    write("landmarks_2940.txt", landmarks())?;
    write("separable_3000.csv", separable(3000, 20, 0.1, 3000))?;
    write("separable_16.csv", separable(16, 4, 0.2, 16))?;
    write("blobs_20.csv", separable(20, 2, 0.0, 20))?;
    Ok(())
}

const COUNTRIES: [&str; 6] = ["United States", "India", "New Zealand", "Jordan", "United Kingdom", "Brazil"];
const ETHNICITIES: [&str; 5] = ["White-European", "Asian", "Middle Eastern", "Black", "Latino"];
const RELATIONS: [&str; 4] = ["Self", "Parent", "Relative", "Health care professional"];

/// Questionnaire-style table shaped like the adult screening data: an id,
/// ten binary answers, nine demographic columns and a YES/NO label.
fn behavioral() -> String {
    let mut rng = seed::rng(705);
    let mut s = String::from(
        "id,A1_Score,A2_Score,A3_Score,A4_Score,A5_Score,A6_Score,A7_Score,A8_Score,A9_Score,A10_Score,\
         age,gender,ethnicity,jaundice,autism,country_of_res,used_app_before,result,relation,Class/ASD\n",
    );
    let mut blank_rows: Vec<usize> = (0..BEHAVIORAL_ROWS).collect();
    blank_rows.shuffle(&mut rng);
    blank_rows.truncate(BEHAVIORAL_WITH_BLANKS);
    blank_rows.sort_unstable();

    for row in 0..BEHAVIORAL_ROWS {
        let asd = rng.gen_bool(0.3);
        let p = if asd { 0.72 } else { 0.32 };
        let answers: Vec<u8> = (0..10).map(|_| u8::from(rng.gen_bool(p))).collect();
        let result: u8 = answers.iter().sum();
        // About one label in eight disagrees with the answers.
        let label = if rng.gen_bool(0.12) { !asd } else { asd };
        let mut cells: Vec<String> = vec![(row + 1).to_string()];
        cells.extend(answers.iter().map(u8::to_string));
        cells.push(rng.gen_range(17..65).to_string());
        cells.push(["m", "f"][rng.gen_range(0..2)].into());
        cells.push(ETHNICITIES[rng.gen_range(0..ETHNICITIES.len())].into());
        cells.push(yes_no(rng.gen_bool(if asd { 0.15 } else { 0.08 })));
        cells.push(yes_no(rng.gen_bool(if asd { 0.25 } else { 0.1 })));
        cells.push(COUNTRIES[rng.gen_range(0..COUNTRIES.len())].into());
        cells.push(yes_no(rng.gen_bool(0.05)));
        cells.push(result.to_string());
        cells.push(RELATIONS[rng.gen_range(0..RELATIONS.len())].into());
        cells.push(yes_no(label).to_uppercase());
        if blank_rows.binary_search(&row).is_ok() {
            // Blanks land in the same columns as in the public data: age,
            // ethnicity and relation.
            let n_blank = rng.gen_range(1..=3);
            let mut cols = [11, 13, 19];
            cols.shuffle(&mut rng);
            for &c in &cols[..n_blank] {
                cells[c].clear();
            }
        }
        let line: Vec<String> = cells.into_iter().map(|c| csv_cell(&c)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn csv_cell(c: &str) -> String {
    if c.contains(',') {
        format!("\"{c}\"")
    } else {
        c.to_string()
    }
}

/// Reference face in a 200x200 box, indexed by the 68-point template.
fn template_face() -> Vec<(f64, f64)> {
    let mut p = Vec::with_capacity(68);
    for i in 0..17 {
        let t = std::f64::consts::PI * i as f64 / 16.0;
        p.push((100.0 - 80.0 * t.cos(), 90.0 + 90.0 * t.sin()));
    }
    for i in 0..5 {
        p.push((40.0 + 12.0 * i as f64, 62.0 - 4.0 * (2.0 - (i as f64 - 2.0).abs())));
    }
    for i in 0..5 {
        p.push((112.0 + 12.0 * i as f64, 62.0 - 4.0 * (2.0 - (i as f64 - 2.0).abs())));
    }
    for i in 0..4 {
        p.push((100.0, 80.0 + 10.0 * i as f64));
    }
    for i in 0..5 {
        p.push((88.0 + 6.0 * i as f64, 118.0 + if i == 2 { 3.0 } else { 0.0 }));
    }
    for centre in [70.0, 130.0] {
        for (dx, dy) in [(-12.0, 0.0), (-6.0, -5.0), (6.0, -5.0), (12.0, 0.0), (6.0, 5.0), (-6.0, 5.0)] {
            p.push((centre + dx, 85.0 + dy));
        }
    }
    for i in 0..12 {
        let t = 2.0 * std::f64::consts::PI * i as f64 / 12.0;
        p.push((100.0 - 30.0 * t.cos(), 148.0 + 12.0 * t.sin()));
    }
    for i in 0..8 {
        let t = 2.0 * std::f64::consts::PI * i as f64 / 8.0;
        p.push((100.0 - 20.0 * t.cos(), 148.0 + 5.0 * t.sin()));
    }
    assert_eq!(p.len(), 68);
    p
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// Faces for both classes with a small class shift in eye and brow spacing,
/// plus a fixed number of truncated or garbled records per class.
fn landmarks() -> String {
    let mut rng = seed::rng(2940);
    let template = template_face();
    let mut lines = Vec::with_capacity(2 * FACES_PER_CLASS);
    for (label, n_bad) in [(0u8, MALFORMED_ASD), (1u8, MALFORMED_NON_ASD)] {
        let mut bad: Vec<bool> = (0..FACES_PER_CLASS).map(|i| i < n_bad).collect();
        bad.shuffle(&mut rng);
        for (i, is_bad) in bad.into_iter().enumerate() {
            let id = format!("{}_{:04}", if label == 0 { "asd" } else { "td" }, i);
            let scale = rng.gen_range(0.85..1.15);
            let (tx, ty) = (rng.gen_range(0.0..40.0), rng.gen_range(0.0..40.0));
            let spread = if label == 0 { rng.gen_range(2.0..8.0) } else { rng.gen_range(-2.0..4.0) };
            let points: Vec<Point> = template
                .iter()
                .enumerate()
                .map(|(k, &(x, y))| {
                    // Widen or narrow around the midline for eyes and brows.
                    let side = if (36..=41).contains(&k) || (17..=21).contains(&k) {
                        -1.0
                    } else if (42..=47).contains(&k) || (22..=26).contains(&k) {
                        1.0
                    } else {
                        0.0
                    };
                    let x = x + side * spread + rng.gen_range(-1.5..1.5);
                    let y = y + rng.gen_range(-1.5..1.5);
                    Point::new(round2(x * scale + tx), round2(y * scale + ty))
                })
                .collect();
            let set = LandmarkSet::new(id, label, points).expect("template face is valid");
            let mut line = format_record(&set);
            if is_bad {
                line = corrupt(&line, &mut rng);
            }
            lines.push(line);
        }
    }
    lines.shuffle(&mut rng);
    let mut s = String::new();
    for l in lines {
        writeln!(s, "{l}").unwrap();
    }
    s
}

/// Either drop trailing points (an undetected face region) or garble one.
fn corrupt(line: &str, rng: &mut seed::Rng) -> String {
    let mut fields: Vec<String> = line.split(',').map(String::from).collect();
    if rng.gen_bool(0.7) {
        let keep = rng.gen_range(20..68);
        fields.truncate(2 + keep);
    } else {
        let k = rng.gen_range(2..fields.len());
        fields[k] = "?:?".into();
    }
    fields.join(",")
}

/// Balanced, linearly separable rows in `[-1, 1]^dim` with the given margin
/// around a seeded hyperplane through the origin.
fn separable(n: usize, dim: usize, margin: f64, seed_value: u64) -> String {
    let mut rng = seed::rng(seed_value);
    let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut s = String::new();
    for j in 0..dim {
        write!(s, "x{j},").unwrap();
    }
    s.push_str("class\n");
    let mut counts = [0usize; 2];
    while counts[0] + counts[1] < n {
        let x: Vec<f64> = (0..dim).map(|_| round2(rng.gen_range(-1.0..1.0))).collect();
        let score = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / norm;
        if score.abs() <= margin {
            continue;
        }
        let label = usize::from(score < 0.0);
        if counts[label] == n / 2 + (n % 2) * label {
            continue;
        }
        counts[label] += 1;
        for v in &x {
            write!(s, "{v},").unwrap();
        }
        writeln!(s, "{label}").unwrap();
    }
    s
}
