//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.
//!
//! Run alone with `cargo test -p lgc-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lgc_core::bitcodec::{elias_delta_read, elias_delta_write};
use lgc_core::partition::{self, cw_check, cw_matrix, distortion, BinaryMatrix, SharedRandomness, Ternary, TernaryVector};
use lgc_core::protocols::{t2_encode, t3_decode, t3_encode};
use lgc_core::simlab::{self, run_trials, sample, LawSpec};
use lgc_core::{
    entails, entails_groebner, sigma, zeros, AlgSet, BitReader, BitWriter, CodecKind, Monomial, Poly, PolySet, Scenario,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const T1_RATE_WINDOW: (f64, f64) = (0.702, 0.742);
const T1_TIME_LIMIT: Duration = Duration::from_secs(30);
const T4_RATE_WINDOW: (f64, f64) = (0.48, 0.5056);
const RANDOM_CODE_MEAN_BITS: f64 = 17.0;
const STD_ERRORS: f64 = 3.0;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn h(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = run_trials(Scenario::T1, &LawSpec::Single { p: 0.2 }, 12, 200, None, 1).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    // size header plus rank: H(p) + (log₂ pN + 2 log₂ log₂ pN + 4) / N
    let n = 4096.0f64;
    let l = (0.2 * n).log2();
    let upper = h(0.2) + (l + 2.0 * l.log2() + 4.0) / n;
    check(
        r.mean >= T1_RATE_WINDOW.0 && r.mean <= T1_RATE_WINDOW.1 && r.mean <= upper && elapsed < T1_TIME_LIMIT,
        format!(
            "T1 m=12 p=0.2: mean {:.6} (H = {:.6}, upper {:.6}), {:.2}s",
            r.mean,
            h(0.2),
            upper,
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Outcome {
    let law = LawSpec::Nested { inner: 0.25, outer: 0.75 };
    // any sandwich violation aborts the run with an error
    let r = run_trials(Scenario::T4, &law, 12, 100, Some(CodecKind::Linear), 2).map_err(|e| e.to_string())?;
    let lambda = 0.5;
    check(
        r.mean >= T4_RATE_WINDOW.0 && r.mean <= T4_RATE_WINDOW.1,
        format!(
            "T4 linear m=12 (0.25, 0.75): mean {:.6}, gap to lambda {:.6}, sandwich held on {} trials",
            r.mean,
            r.mean - lambda,
            r.trials
        ),
    )
}

fn criterion_3() -> Outcome {
    let n = 16;
    let trials = 100;
    let mut total_bits = 0usize;
    let mut distorted = 0;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + t as u64);
        let x = TernaryVector::new(
            (0..n)
                .map(|_| match rng.gen_range(0..4) {
                    0 => Ternary::Zero,
                    1 => Ternary::One,
                    _ => Ternary::Free,
                })
                .collect(),
        );
        let shared = SharedRandomness::for_law(t as u64, 0.25, 0.25);
        let mut w = BitWriter::new();
        partition::random_encode(&x, &shared, &mut w).map_err(|e| e.to_string())?;
        let bits = w.finish();
        total_bits += bits.len();
        let mut r = BitReader::with_len(bits.as_bytes(), bits.len());
        let y = partition::random_decode(&mut r, n, &shared).map_err(|e| e.to_string())?;
        if distortion(&x, &y) != 0 {
            distorted += 1;
        }
    }
    let mean = total_bits as f64 / trials as f64;
    check(
        mean <= RANDOM_CODE_MEAN_BITS && distorted == 0,
        format!("random code n=16 (0.25, 0.25): mean {mean:.2} bits, {distorted} distorted of {trials}"),
    )
}

fn criterion_4() -> Outcome {
    let grid = simlab::simplex_grid(0.02, 0.02, 0.4).map_err(|e| e.to_string())?;
    let csv = simlab::sweep_lambda_vs_naive(&grid, None).map_err(|e| e.to_string())?;
    let mut rows = 0;
    let mut bad = Vec::new();
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let (pa, pb, ha, hb, lam) = (v[0], v[1], v[2], v[3], v[5]);
        // independent value of Λ
        let oracle = (pa + pb) * h(pa / (pa + pb));
        if (oracle - lam).abs() > 1e-6 {
            bad.push(format!("Λ({pa},{pb}) printed {lam}, expected {oracle:.6}"));
        }
        if pa + pb < 1.0 && lam >= ha.min(hb) {
            bad.push(format!("Λ({pa},{pb}) = {lam} not below min H = {}", ha.min(hb)));
        }
        rows += 1;
    }
    let detail = match bad.first() {
        None => format!("Λ below min(H(p_a), H(p_b)) at all {rows} grid points"),
        Some(first) => format!("{} of {rows} grid points violate; first: {first}", bad.len()),
    };
    check(bad.is_empty() && rows == 400, detail)
}

fn criterion_5() -> Outcome {
    for mask in 0u32..256 {
        let a = AlgSet::from_points(3, (0..8).filter(|i| mask >> i & 1 == 1)).unwrap();
        if zeros(&sigma(&a)).unwrap() != a {
            return Err(format!("m=3 subset {mask:08b} does not round-trip"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..500 {
        let p = rng.gen::<f64>();
        let a = sample(&LawSpec::Single { p }, 12, rng.gen()).unwrap().inner;
        if zeros(&sigma(&a)).unwrap() != a {
            return Err(format!("m=12 subset #{k} does not round-trip"));
        }
    }
    Ok("256 subsets at m=3 and 500 random subsets at m=12 round-trip".into())
}

fn random_polyset(rng: &mut ChaCha8Rng, m: usize) -> PolySet {
    let count = rng.gen_range(0..4);
    let polys = (0..count).map(|_| {
        let terms = rng.gen_range(1..5);
        Poly::from_monomials((0..terms).map(|_| Monomial::from_mask(rng.gen_range(0..1u64 << m))))
    });
    PolySet::from_polys(m, polys.collect::<Vec<_>>())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut held = 0;
    for k in 0..500 {
        let m = rng.gen_range(1..=6);
        let s = random_polyset(&mut rng, m);
        // bias towards entailed pairs: half the queries are consequences of s
        let t = if rng.gen_bool(0.5) {
            let extra = random_polyset(&mut rng, m);
            let zs = zeros(&s).unwrap();
            sigma(&zs.union(&zeros(&extra).unwrap()))
        } else {
            random_polyset(&mut rng, m)
        };
        let brute = entails(&s, &t).unwrap();
        let gb = entails_groebner(&s, &t).map_err(|e| e.to_string())?;
        if brute != gb {
            return Err(format!("pair #{k} at m={m}: brute {brute}, Gröbner {gb}"));
        }
        held += brute as usize;
    }
    let x = |i| Poly::var(i);
    let one = Poly::one();
    let first = PolySet::from_polys(
        3,
        [
            x(1).mul(&x(2)).mul(&x(3)),
            one.add(&x(1)).mul(&one.add(&x(2))).mul(&one.add(&x(3))),
        ],
    );
    let second = PolySet::from_polys(
        3,
        [Poly::from_monomials(
            [0b011, 0b101, 0b110, 0b001, 0b010, 0b100, 0].map(Monomial::from_mask),
        )],
    );
    let both_ways = entails_groebner(&first, &second).unwrap() && entails_groebner(&second, &first).unwrap();
    check(
        both_ways,
        format!("500 pairs agree ({held} entailed); two-form mixed-facts example entails both ways: {both_ways}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..200 {
        let m = rng.gen_range(1..=10);
        let outer = rng.gen::<f64>();
        let inner = outer * rng.gen::<f64>();
        let draw = sample(&LawSpec::Nested { inner, outer }, m, rng.gen()).unwrap();
        let (s, r) = (sigma(&draw.inner), sigma(draw.outer.as_ref().unwrap()));
        let t2 = t2_encode(&s, &r).map_err(|e| e.to_string())?;
        let t3 = t3_encode(&s, &r).map_err(|e| e.to_string())?;
        let d = t3_decode(&t3, &r).map_err(|e| e.to_string())?;
        if zeros(&d.union(&r)).unwrap() != draw.inner {
            return Err(format!("case #{k} (m={m}): Z(Δ ∪ r) differs from Z(s)"));
        }
        if let Some(w) = d.iter().find(|w| entails(&r, &PolySet::from_polys(m, [(*w).clone()])).unwrap()) {
            return Err(format!("case #{k} (m={m}): Δ member {w} follows from r"));
        }
        if t2.payload_bits() != t3.payload_bits() {
            return Err(format!("case #{k}: T2 {} bits, T3 {} bits", t2.payload_bits(), t3.payload_bits()));
        }
    }
    Ok("200 nested cases at m ≤ 10: contract held, T3 bits equal T2 bits".into())
}

fn criterion_8() -> Outcome {
    let mut w = BitWriter::new();
    let mut expected_total = 0usize;
    for n in 1u64..=1 << 20 {
        let before = w.len();
        elias_delta_write(&mut w, n).map_err(|e| e.to_string())?;
        // bit length of n, then of that length, from first principles
        let bits_n = 64 - n.leading_zeros() as usize;
        let bits_len = 64 - (bits_n as u64).leading_zeros() as usize;
        let expected = (bits_n - 1) + 2 * (bits_len - 1) + 1;
        if w.len() - before != expected {
            return Err(format!("elias({n}) is {} bits, expected {expected}", w.len() - before));
        }
        expected_total += expected;
    }
    let stream = w.finish();
    let mut r = BitReader::with_len(stream.as_bytes(), stream.len());
    for n in 1u64..=1 << 20 {
        let got = elias_delta_read(&mut r).map_err(|e| e.to_string())?;
        if got != n {
            return Err(format!("decoded {got}, expected {n}"));
        }
    }
    check(
        stream.len() == expected_total,
        format!("lengths and round trip verified for 1..=2^20 ({expected_total} bits)"),
    )
}

fn criterion_9() -> Outcome {
    let example = BinaryMatrix::parse("000111\n011010\n101100\n110001");
    if !cw_check(&example) {
        return Err("the 4x6 example matrix fails".into());
    }
    // every ordering-free choice of distinct weight-2 columns, for t = 4, 5, 6
    let mut checked = 0;
    for t in 4..=6usize {
        let cols: Vec<u32> = (0u32..1 << t).filter(|c| c.count_ones() == 2).collect();
        for pick in 0u64..1 << cols.len().min(16) {
            if pick.count_ones() != 6 {
                continue;
            }
            let chosen: Vec<u32> = (0..cols.len()).filter(|i| pick >> i & 1 == 1).map(|i| cols[i]).collect();
            let rows = (0..t).map(|row| chosen.iter().map(|c| c >> row & 1 == 1).collect()).collect();
            if !cw_check(&BinaryMatrix::from_rows(rows)) {
                return Err(format!("t={t} column set {chosen:?} fails"));
            }
            checked += 1;
        }
        if !cw_check(&cw_matrix(t, 6, 2).map_err(|e| e.to_string())?) {
            return Err(format!("cw_matrix({t}, 6, 2) fails"));
        }
    }
    let duplicated = BinaryMatrix::parse("000110\n011011\n101100\n110001");
    check(
        !cw_check(&duplicated),
        format!("example passes, {checked} weight-2 column sets pass, duplicated columns rejected"),
    )
}

fn criterion_10() -> Outcome {
    let matrix: Vec<(Scenario, LawSpec, usize, Option<CodecKind>, usize)> = vec![
        (Scenario::T1, LawSpec::Single { p: 0.05 }, 12, None, 200),
        (Scenario::T1, LawSpec::Single { p: 0.2 }, 12, None, 200),
        (Scenario::T1, LawSpec::Single { p: 0.5 }, 12, None, 200),
        (Scenario::T2, LawSpec::Nested { inner: 0.2, outer: 0.5 }, 12, None, 200),
        (Scenario::T2, LawSpec::Nested { inner: 0.05, outer: 0.9 }, 12, None, 200),
        (Scenario::T3, LawSpec::Nested { inner: 0.2, outer: 0.5 }, 8, None, 100),
        (Scenario::T4, LawSpec::Nested { inner: 0.25, outer: 0.75 }, 12, Some(CodecKind::Linear), 50),
        (Scenario::T4, LawSpec::Nested { inner: 0.1, outer: 0.6 }, 12, Some(CodecKind::Linear), 50),
        (Scenario::T4, LawSpec::Nested { inner: 0.1, outer: 0.6 }, 12, Some(CodecKind::Naive), 200),
        (Scenario::T4, LawSpec::Nested { inner: 0.25, outer: 0.75 }, 4, Some(CodecKind::Random), 200),
        (
            Scenario::T5,
            LawSpec::Conditional { p_r: 0.5, s_r: 0.2, q_r: 0.7, s_rc: 0.05, q_rc: 0.4 },
            10,
            Some(CodecKind::Linear),
            50,
        ),
    ];
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for (k, (scenario, law, m, codec, trials)) in matrix.iter().enumerate() {
        let r = run_trials(*scenario, law, *m, *trials, *codec, 10 + k as u64).map_err(|e| e.to_string())?;
        let margin = (r.mean - r.lower) / r.std_error().max(f64::MIN_POSITIVE);
        worst = worst.min(margin);
        if r.mean < r.lower - STD_ERRORS * r.std_error() {
            failures.push(format!("{scenario} {law} m={m}: mean {:.6} < lower {:.6}", r.mean, r.lower));
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{} configurations, worst (mean - lower)/SE = {worst:.1}{}",
            matrix.len(),
            failures.first().map(|f| format!("; {f}")).unwrap_or_default()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("T1 rate", criterion_1),
        ("T4 linear rate and sandwich", criterion_2),
        ("random-coding codeword length", criterion_3),
        ("partition limit beats naive", criterion_4),
        ("sigma/zeros exactness", criterion_5),
        ("entailment engines agree", criterion_6),
        ("incremental communication", criterion_7),
        ("Elias delta", criterion_8),
        ("constant column weight", criterion_9),
        ("no undershoot of the limits", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
