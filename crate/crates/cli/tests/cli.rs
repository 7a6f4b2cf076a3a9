use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempfile::TempDir;
use tensim::io::{parse_tensor, tensor_to_json, TensorFormat};
use tensim::{structured_transform, CTensor, DiagonalScaling, Permutation, StructuredWitness, Tensor};

struct Run {
    code: i32,
    stdout: String,
    doc: Value,
}

fn tensim(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_tensim")).args(args).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).expect("utf-8 stdout");
    let doc =
        serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("stdout is not one JSON document: {e}\n{stdout}"));
    Run { code: out.status.code().expect("exit code"), stdout, doc }
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden").join(name)
}

fn write(dir: &TempDir, name: &str, v: &Value) -> String {
    let path = dir.path().join(name);
    fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn write_tensor(dir: &TempDir, name: &str, t: &CTensor) -> String {
    write(dir, name, &tensor_to_json(t, TensorFormat::Sparse).unwrap())
}

fn random_tensor(rng: &mut ChaCha8Rng, order: usize, dim: usize) -> CTensor {
    Tensor::from_fn(order, dim, |_| {
        if rng.gen_bool(0.3) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
        }
    })
    .unwrap()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn demos_match_golden_files() {
    for name in ["remark-3-4", "remark-3-7", "remark-3-10"] {
        let run = tensim(&["demo", name]);
        assert_eq!(run.code, 0, "{name}");
        let expected = fs::read_to_string(golden(&format!("{name}.json"))).unwrap();
        assert_eq!(run.stdout, expected, "{name} drifted from its golden file");
    }
}

#[test]
fn nnz_demo_content() {
    let doc = tensim(&["demo", "remark-3-4"]).doc;
    assert_eq!(doc["nnz_A"], 1);
    assert_eq!(doc["nnz_B"], 4);
    assert_eq!(doc["pq_is_identity"], true);
    assert_eq!(doc["qp_is_identity"], true);
    assert_eq!(doc["B"]["data"], json!([[-1.0, 1.0], [-1.0, 1.0]]));
    assert_eq!(doc["uncorrected_example"]["PQ"]["data"], json!([[2.0, -1.0], [1.0, -1.0]]));
    assert_eq!(doc["uncorrected_example"]["pq_is_identity"], false);
}

#[test]
fn triangular_demo_content() {
    let doc = tensim(&["demo", "remark-3-10"]).doc;
    assert_eq!(doc["A"]["order"], 3);
    assert_eq!(doc["A"]["dim"], 2);
    assert_eq!(doc["relabelings_checked"], 2);
    assert_eq!(doc["triangularizable"], false);
    for entry in doc["certificate"].as_array().unwrap() {
        assert!(!entry["upper_violation"].is_null());
        assert!(!entry["lower_violation"].is_null());
    }
}

#[test]
fn diagonalizable_demo_content() {
    let doc = tensim(&["demo", "remark-3-7"]).doc;
    assert_eq!(doc["matrix_case"]["B"]["data"], json!([[3.0, 0.0], [0.0, 1.0]]));
    assert_eq!(doc["tensor_case"]["diagonal"]["B_is_diagonal"], true);
    assert_eq!(doc["tensor_case"]["all_ones"]["nnz"], 8);
    assert_eq!(doc["tensor_case"]["all_ones"]["matrix_witness_unit_preserving_at_order_3"], false);
}

#[test]
fn decompose_reads_sigma_and_d() {
    let dir = TempDir::new().unwrap();
    let q = write(&dir, "q.json", &json!([[0, 2], [3, 0]]));
    let p = write(&dir, "p.json", &json!([[0, 1.0 / 9.0], [0.25, 0]]));
    let run = tensim(&["decompose", &p, &q, "--m", "3"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.doc["sigma"], json!([2, 1]));
    assert_eq!(run.doc["d"], json!([[2.0, 0.0], [3.0, 0.0]]));
}

#[test]
fn decompose_and_check_reject_a_non_monomial_witness() {
    let dir = TempDir::new().unwrap();
    let q = write(&dir, "q.json", &json!([[1, 1], [1, -1]]));
    let p = write(&dir, "p.json", &json!([[0.5, 0.5], [0.5, -0.5]]));
    let run = tensim(&["decompose", &p, &q, "--m", "3"]);
    assert_eq!(run.code, 1);
    assert_eq!(run.doc["error"]["kind"], "malformed_witness_row");
    let run = tensim(&["check-witness", &p, &q, "--m", "3"]);
    assert_eq!(run.code, 1);
    assert_eq!(run.doc["unit_preserving"], false);
    // the same pair is a valid matrix similarity
    let run = tensim(&["check-witness", &p, &q, "--m", "2"]);
    assert_eq!(run.code, 0);
    assert!(run.doc["structure"].is_null());
}

#[test]
fn decompose_flags_an_inconsistent_p() {
    let dir = TempDir::new().unwrap();
    let q = write(&dir, "q.json", &json!([[0, 2], [3, 0]]));
    let p = write(&dir, "p.json", &json!([[0, 0.2], [0.25, 0]]));
    let run = tensim(&["decompose", &p, &q, "--m", "3"]);
    assert_ne!(run.code, 0);
    assert!(run.doc["error"].is_object());
}

#[test]
fn decide_on_identical_inputs_returns_the_identity() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = write_tensor(&dir, "a.json", &random_tensor(&mut rng, 3, 3));
    let run = tensim(&["decide", &a, &a]);
    assert_eq!(run.code, 0);
    assert_eq!(run.doc["similar"], true);
    assert_eq!(run.doc["witness"]["sigma"], json!([1, 2, 3]));
    for d in run.doc["witness"]["d"].as_array().unwrap() {
        let (re, im) = (d[0].as_f64().unwrap(), d[1].as_f64().unwrap());
        assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12, "{d}");
    }
}

#[test]
fn decide_witness_reverifies_through_transform() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (k, (order, dim)) in [(3, 2), (3, 3), (4, 3), (5, 2)].into_iter().enumerate() {
        let a = random_tensor(&mut rng, order, dim);
        let mut images: Vec<usize> = (0..dim).collect();
        images.rotate_left(1);
        let d: Vec<Complex64> =
            (0..dim).map(|_| Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(-3.0..3.0))).collect();
        let w =
            StructuredWitness::new(Permutation::new(images).unwrap(), DiagonalScaling::new(d).unwrap(), order).unwrap();
        let b = structured_transform(&a, &w).unwrap();
        let pa = write_tensor(&dir, &format!("a{k}.json"), &a);
        let pb = write_tensor(&dir, &format!("b{k}.json"), &b);

        let decided = tensim(&["decide", &pa, &pb]);
        assert_eq!(decided.code, 0);
        let pw = write(&dir, &format!("w{k}.json"), &decided.doc);
        let run = tensim(&["transform", &pa, "--witness", &pw]);
        assert_eq!(run.code, 0);
        let rebuilt = parse_tensor(&run.doc).unwrap();
        assert!(rebuilt.max_relative_diff(&b).unwrap() < 1e-8);
    }
}

#[test]
fn inline_transform_matches_the_structured_witness() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_tensor(&mut rng, 3, 3);
    let sigma = Permutation::from_one_based(&[2, 3, 1]).unwrap();
    let d = vec![c(2.0), Complex64::new(-1.0, 0.5), c(0.25)];
    let w = StructuredWitness::new(sigma.clone(), DiagonalScaling::new(d).unwrap(), 3).unwrap();
    let expected = structured_transform(&a, &w).unwrap();

    let pa = write_tensor(&dir, "a.json", &a);
    let inverse = sigma.inverse().to_one_based().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    let run = tensim(&["transform", &pa, "--diag", "2,-1+0.5i,0.25", "--perm", &inverse]);
    assert_eq!(run.code, 0);
    let got = parse_tensor(&run.doc).unwrap();
    assert!(got.max_relative_diff(&expected).unwrap() < 1e-12);
}

#[test]
fn decide_says_no_for_different_patterns() {
    let dir = TempDir::new().unwrap();
    let one: CTensor = Tensor::from_entries(3, 2, [([0, 0, 0].as_slice(), c(1.0))]).unwrap();
    let two: CTensor =
        Tensor::from_entries(3, 2, [([0, 0, 0].as_slice(), c(1.0)), ([1, 1, 1].as_slice(), c(1.0))]).unwrap();
    let run = tensim(&["decide", &write_tensor(&dir, "a.json", &one), &write_tensor(&dir, "b.json", &two)]);
    assert_eq!(run.code, 1);
    assert_eq!(run.doc["similar"], false);
    assert!(run.doc["witness"].is_null());
}

#[test]
fn outputs_reparse_as_tensors() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = write_tensor(&dir, "a.json", &random_tensor(&mut rng, 3, 2));
    let b = write_tensor(&dir, "b.json", &random_tensor(&mut rng, 2, 2));
    for args in [
        vec!["product", a.as_str(), b.as_str()],
        vec!["product", a.as_str(), b.as_str(), "--sparse"],
        vec!["transform", a.as_str(), "--perm", "2,1"],
        vec!["transform", a.as_str(), "--diag", "1.5,-2i", "--sparse"],
    ] {
        let run = tensim(&args);
        assert_eq!(run.code, 0, "{args:?}");
        let t = parse_tensor(&run.doc).unwrap();
        assert_eq!(t.dim(), 2);
    }
    let product = parse_tensor(&tensim(&["product", &a, &b]).doc).unwrap();
    assert_eq!(product.order(), 3);
}

#[test]
fn output_file_holds_the_tensor() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a = write_tensor(&dir, "a.json", &random_tensor(&mut rng, 3, 2));
    let out = dir.path().join("out.json");
    let run = tensim(&["transform", &a, "--perm", "2,1", "-o", out.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    assert_eq!(run.doc["order"], 3);
    let written: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written, tensim(&["transform", &a, "--perm", "2,1"]).doc);
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = write_tensor(&dir, "a.json", &random_tensor(&mut rng, 3, 2));
    let b = write_tensor(&dir, "b.json", &random_tensor(&mut rng, 3, 2));
    for args in [
        vec!["product", a.as_str(), b.as_str()],
        vec!["decide", a.as_str(), a.as_str()],
        vec!["invariants", a.as_str()],
        vec!["charpoly", a.as_str()],
        vec!["demo", "remark-3-7"],
    ] {
        assert_eq!(tensim(&args).stdout, tensim(&args).stdout, "{args:?}");
    }
}

#[test]
fn charpoly_of_a_diagonal_tensor() {
    let dir = TempDir::new().unwrap();
    let a: CTensor =
        Tensor::from_entries(3, 2, [([0, 0, 0].as_slice(), c(2.0)), ([1, 1, 1].as_slice(), c(3.0))]).unwrap();
    let run = tensim(&["charpoly", &write_tensor(&dir, "a.json", &a)]);
    assert_eq!(run.code, 0);
    assert_eq!(run.doc["charpoly"]["degree"], 4);
    let expected = [36.0, -60.0, 37.0, -10.0, 1.0];
    for (got, want) in run.doc["charpoly"]["coeffs"].as_array().unwrap().iter().zip(expected) {
        assert!((got[0].as_f64().unwrap() - want).abs() < 1e-9 * 60.0, "{got} vs {want}");
        assert!(got[1].as_f64().unwrap().abs() < 1e-9 * 60.0);
    }
    let mut roots: Vec<f64> = run.doc["spectrum"].as_array().unwrap().iter().map(|z| z[0].as_f64().unwrap()).collect();
    roots.sort_by(f64::total_cmp);
    for (got, want) in roots.iter().zip([2.0, 2.0, 3.0, 3.0]) {
        assert!((got - want).abs() < 1e-6);
    }
}

#[test]
fn charpoly_needs_dimension_two() {
    let dir = TempDir::new().unwrap();
    let a: CTensor = Tensor::zeros(3, 3).unwrap();
    let run = tensim(&["charpoly", &write_tensor(&dir, "a.json", &a)]);
    assert_eq!(run.code, 2);
    assert_eq!(run.doc["error"]["kind"], "unsupported_dimension");
}

#[test]
fn invariants_agree_on_similar_tensors() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = random_tensor(&mut rng, 3, 3);
    let w = StructuredWitness::new(
        Permutation::from_one_based(&[3, 1, 2]).unwrap(),
        DiagonalScaling::new(vec![c(2.0), c(-0.5), Complex64::new(0.0, 1.0)]).unwrap(),
        3,
    )
    .unwrap();
    let b = structured_transform(&a, &w).unwrap();
    let ra = tensim(&["invariants", &write_tensor(&dir, "a.json", &a)]);
    let rb = tensim(&["invariants", &write_tensor(&dir, "b.json", &b)]);
    assert_eq!(ra.code, 0);
    assert_eq!(ra.doc, rb.doc);
    assert_eq!(ra.doc["hash_omitted"], false);
}

#[test]
fn input_errors_exit_two_with_an_error_document() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"order\": 3").unwrap();
    let missing = dir.path().join("missing.json");
    let run = tensim(&["invariants", bad.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert_eq!(run.doc["error"]["kind"], "json");
    let run = tensim(&["invariants", missing.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert_eq!(run.doc["error"]["kind"], "io");
    let run = tensim(&["transform", missing.to_str().unwrap(), "--perm", "1,x"]);
    assert_eq!(run.code, 2);
    assert_eq!(run.doc["error"]["kind"], "usage");
    let run = tensim(&["demo", "remark-9"]);
    assert_eq!(run.code, 2);
}

#[test]
fn bad_permutation_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let a: CTensor = Tensor::zeros(3, 2).unwrap();
    let pa = write_tensor(&dir, "a.json", &a);
    let run = tensim(&["transform", &pa, "--perm", "1,1"]);
    assert_eq!(run.code, 2);
    assert_eq!(run.doc["error"]["kind"], "invalid_permutation");
    let run = tensim(&["transform", &pa, "--diag", "1,0"]);
    assert_eq!(run.code, 2);
    assert_eq!(run.doc["error"]["kind"], "zero_scaling");
}
