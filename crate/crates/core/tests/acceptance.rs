//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use abelian_returns::analysis::{self, detect_period, survey, Theorem};
use abelian_returns::lexarray::{
    self, balanced_orbit_array, column_shift_check, is_balanced_jz, lex_array,
};
use abelian_returns::returns::{self, return_words, stabilize, Side};
use abelian_returns::{ClassId, StabilizationPolicy, Word, WordSource};

type Outcome = Result<String, String>;

const TM: &str = "morphic:0>01,1>10:seed=0";
const CHOICE: &str = "choice:110010|110100:selector=morphic:0>01,1>10:seed=0";
const PERIOD_24: &str = "periodic:001101001011001100110011";

/// Smallest factor length at which Thue-Morse has an abelian class with a
/// number of abelian returns outside {2, 3}.
const TM_WITNESS_LENGTH: usize = 3;

/// The lexicographic array of 0101001, transcribed row by row.
const PAPER_GRID: [&str; 7] = [
    "0 & 0 & 1 & 0 & 1 & 0 & 1",
    "0 & 1 & 0 & 0 & 1 & 0 & 1",
    "0 & 1 & 0 & 1 & 0 & 0 & 1",
    "0 & 1 & 0 & 1 & 0 & 1 & 0",
    "1 & 0 & 0 & 1 & 0 & 1 & 0",
    "1 & 0 & 1 & 0 & 0 & 1 & 0",
    "1 & 0 & 1 & 0 & 1 & 0 & 0",
];

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn src(s: &str) -> WordSource {
    s.parse().unwrap()
}

fn ids(words: &[&str]) -> BTreeSet<ClassId> {
    words.iter().map(|s| ClassId::of(&w(s))).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

/// Thue-Morse letters by the parity of the binary digit sum.
fn thue_morse_bits(n: usize) -> Vec<u8> {
    (0..n).map(|i| (i.count_ones() % 2) as u8).collect()
}

/// Number of abelian return classes of every abelian class of length `n`,
/// keyed by the number of ones. Brute force over one fixed prefix.
fn brute_return_counts(bits: &[u8], n: usize) -> BTreeMap<usize, usize> {
    let ones = |s: &[u8]| s.iter().filter(|&&b| b == 1).count();
    let mut positions: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..=bits.len() - n {
        positions.entry(ones(&bits[i..i + n])).or_default().push(i);
    }
    positions
        .into_iter()
        .map(|(c, pos)| {
            let classes: BTreeSet<(usize, usize)> = pos
                .windows(2)
                .map(|p| (p[1] - p[0], ones(&bits[p[0]..p[1]])))
                .collect();
            (c, classes.len())
        })
        .collect()
}

/// Balance of a circular word, comparing every pair of circular factors of
/// each length.
fn circular_pairwise_balanced(bits: &[u8]) -> bool {
    let q = bits.len();
    let count = |start: usize, len: usize| (0..len).filter(|k| bits[(start + k) % q] == 1).count();
    (1..q).all(|len| (0..q).all(|i| (0..q).all(|j| count(i, len).abs_diff(count(j, len)) <= 1)))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let policy = StabilizationPolicy::new(1024, 2, 1 << 12).unwrap();
    let word = src(TM).prefix(1 << 12).unwrap();
    let (set, report) =
        stabilize(&word, &w("01"), &policy, Side::Left).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(report.stable, || {
        format!("not stable by {}", report.prefix_used)
    })?;
    ensure(report.prefix_used <= 1 << 12, || {
        format!("prefix {}", report.prefix_used)
    })?;
    ensure(set.class_ids() == ids(&["0", "1", "01"]), || {
        format!("classes {:?}", set.representatives())
    })?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "returns of [01] = {{0, 1, 01~ab10}}, stable at prefix {} in {elapsed:.2?}",
        report.prefix_used
    ))
}

fn criterion_2() -> Outcome {
    let expected: String = PAPER_GRID
        .iter()
        .map(|r| r.replace(" & ", "") + "\n")
        .collect();
    let from_word = lex_array(&w("0101001")).map_err(|e| e.to_string())?;
    let from_formula = balanced_orbit_array(3, 7).map_err(|e| e.to_string())?;
    ensure(from_word.grid() == expected, || {
        format!("lex_array grid\n{}", from_word.grid())
    })?;
    ensure(from_formula.grid() == expected, || {
        format!("balanced_orbit_array grid\n{}", from_formula.grid())
    })?;
    ensure(
        column_shift_check(&from_word) && column_shift_check(&from_formula),
        || "column shift identity fails".into(),
    )?;
    Ok("7x7 grid matches byte-for-byte; column shift identity holds".into())
}

fn criterion_3() -> Outcome {
    let expected = ids(&["0", "1", "01"]);
    let array = lex_array(&w("0101001")).map_err(|e| e.to_string())?;
    let by_array = array
        .abelian_returns(&w("001"))
        .map_err(|e| e.to_string())?;
    ensure(by_array.class_ids() == expected, || {
        format!("array route {:?}", by_array.representatives())
    })?;
    let policy = StabilizationPolicy::new(1024, 2, 1 << 14).unwrap();
    let (by_scan, report) =
        returns::stabilized_abelian_returns(&src("periodic:0010101"), &w("001"), &policy)
            .map_err(|e| e.to_string())?;
    ensure(report.stable, || "periodic scan did not stabilize".into())?;
    ensure(by_scan.class_ids() == expected, || {
        format!("scan route {:?}", by_scan.representatives())
    })?;
    Ok("returns of [001] = {0, 1, 01} from the array rows and from periodic(0010101)".into())
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let policy = StabilizationPolicy::new(4096, 2, 1 << 18).unwrap();
    let max_len = 25;
    let mut summary = Vec::new();
    for name in ["cf:1,...", "cf:2,1,..."] {
        let source = src(name);
        let verdicts = analysis::verify_all(
            &source,
            &[Theorem::Main, Theorem::Singular, Theorem::Structure],
            max_len,
            &policy,
        )
        .map_err(|e| e.to_string())?;
        for v in &verdicts {
            ensure(v.holds && v.witnesses.is_empty(), || {
                format!("{name}: {} has witnesses {:?}", v.theorem, v.witnesses)
            })?;
            ensure(v.caveats.is_empty(), || {
                format!("{name}: {} has caveats {:?}", v.theorem, v.caveats)
            })?;
        }

        // Direct recount from the survey data.
        let word = source.prefix(policy.max).unwrap();
        let surveys = survey(&word, max_len, &policy).map_err(|e| e.to_string())?;
        let mut classifier = analysis::ShapeClassifier::new(&word);
        let mut classes = 0;
        for s in &surveys {
            let singular = s.classes.iter().filter(|c| c.is_singular()).count();
            ensure(s.n < 2 || singular <= 1, || {
                format!("{name}: {singular} singular classes at n={}", s.n)
            })?;
            for c in &s.classes {
                classes += 1;
                let set = c
                    .stable_returns()
                    .ok_or_else(|| format!("{name}: unstable class {}", c.representative()))?;
                ensure((2..=3).contains(&set.len()), || {
                    format!("{name}: {} has {} returns", c.representative(), set.len())
                })?;
                ensure((set.len() == 2) == c.is_singular(), || {
                    format!(
                        "{name}: {} singular={} with {} returns",
                        c.representative(),
                        c.is_singular(),
                        set.len()
                    )
                })?;
                let mut lengths = BTreeMap::new();
                for rc in &set.classes {
                    *lengths.entry(rc.id.length).or_insert(0) += 1;
                    ensure(
                        classifier.classify(&rc.representative) != analysis::ReturnShape::Other,
                        || {
                            format!(
                                "{name}: return {} of {} is not a letter or aBb",
                                rc.representative,
                                c.representative()
                            )
                        },
                    )?;
                }
                ensure(lengths.iter().all(|(&l, &k)| l < 2 || k == 1), || {
                    format!(
                        "{name}: {} has two returns of one length",
                        c.representative()
                    )
                })?;
            }
        }
        summary.push(format!("{name}: {classes} classes"));
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "{}; zero violations, zero caveats in {elapsed:.2?}",
        summary.join(", ")
    ))
}

fn criterion_5() -> Outcome {
    let bits = thue_morse_bits(1 << 14);
    let oracle = (1..=10)
        .find(|&n| {
            brute_return_counts(&bits, n)
                .values()
                .any(|&k| !(2..=3).contains(&k))
        })
        .ok_or("oracle found no witness up to 10")?;
    ensure(oracle == TM_WITNESS_LENGTH, || {
        format!("oracle witness length {oracle}, frozen {TM_WITNESS_LENGTH}")
    })?;

    let policy = StabilizationPolicy::default();
    let v = analysis::verify_sturmian_characterization(&src(TM), 10, &policy)
        .map_err(|e| e.to_string())?;
    ensure(!v.holds, || "verdict holds".into())?;
    ensure(v.caveats.is_empty(), || format!("caveats {:?}", v.caveats))?;
    let found = v.smallest_witness_length();
    ensure(found == Some(TM_WITNESS_LENGTH), || {
        format!("smallest witness length {found:?}")
    })?;
    let first = &v.witnesses[0];
    Ok(format!(
        "holds = false, smallest witness n={} ({}: {}), matches oracle",
        first.length, first.factor, first.observed
    ))
}

fn criterion_6() -> Outcome {
    let policy = StabilizationPolicy::new(4096, 2, 1 << 16).unwrap();
    let periodic = src(PERIOD_24);
    let word = periodic.prefix(policy.max).unwrap();
    let surveys = survey(&word, 24, &policy).map_err(|e| e.to_string())?;
    let mut least = usize::MAX;
    for c in surveys.iter().flat_map(|s| &s.classes) {
        let set = c
            .stable_returns()
            .ok_or_else(|| format!("unstable class {}", c.representative()))?;
        least = least.min(set.len());
    }
    ensure(least >= 2, || format!("a class has {least} returns"))?;
    let period = detect_period(&word);
    ensure(period == Some(24), || format!("detected period {period:?}"))?;

    let choice = src(CHOICE);
    let (set, report) = returns::stabilized_abelian_returns(&choice, &w("11"), &policy)
        .map_err(|e| e.to_string())?;
    ensure(report.stable, || {
        "choice class of 11 did not stabilize".into()
    })?;
    ensure(set.class_ids() == ids(&["110010"]), || {
        format!("choice returns {:?}", set.representatives())
    })?;
    let prefix = choice.prefix(1 << 14).unwrap();
    let exact = return_words(&prefix, &w("11")).map_err(|e| e.to_string())?;
    ensure(exact == [w("110010"), w("110100")].into(), || {
        format!("exact returns {exact:?}")
    })?;
    let choice_period = detect_period(&prefix);
    ensure(choice_period.is_none(), || {
        format!("choice word period {choice_period:?}")
    })?;
    Ok("period-24 word: min 2 returns, period 24; choice word: [11] has one return class {110010~ab110100}, no period".into())
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    let mut mismatches = Vec::new();
    for q in 1..=14usize {
        for mask in 0u32..(1 << q) {
            let p = mask.count_ones() as usize;
            if gcd(p, q) != 1 {
                continue;
            }
            let bits: Vec<u8> = (0..q).map(|i| ((mask >> i) & 1) as u8).collect();
            let word = Word::binary(&bits);
            checked += 1;
            if is_balanced_jz(&word) != circular_pairwise_balanced(&bits) {
                mismatches.push(word.to_string());
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(mismatches.is_empty(), || {
        format!(
            "{} mismatches, first {:?}",
            mismatches.len(),
            &mismatches[..1]
        )
    })?;
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("{checked} words, zero mismatches in {elapsed:.2?}"))
}

fn criterion_8() -> Outcome {
    let policy = StabilizationPolicy::new(4096, 2, 1 << 16).unwrap();
    let sources = [
        "cf:1,...",
        "cf:2,1,...",
        TM,
        "periodic:0010101",
        PERIOD_24,
        CHOICE,
    ];
    let mut compared = 0;
    for name in sources {
        let word = src(name).prefix(policy.max).unwrap();
        for n in 1..=7 {
            let factors = analysis::factors(&word.prefix(4096), n).map_err(|e| e.to_string())?;
            for v in &factors.members {
                let left = stabilize(&word, v, &policy, Side::Left).map_err(|e| e.to_string())?;
                let right = stabilize(&word, v, &policy, Side::Right).map_err(|e| e.to_string())?;
                if !(left.1.stable && right.1.stable) {
                    continue;
                }
                ensure(left.0.class_ids() == right.0.class_ids(), || {
                    format!(
                        "{name} {v}: left {:?} right {:?}",
                        left.0.representatives(),
                        right.0.representatives()
                    )
                })?;
                compared += 1;
            }
        }
    }
    ensure(compared >= 200, || {
        format!("only {compared} pairs compared")
    })?;
    Ok(format!(
        "{compared} (source, factor) pairs, left and right returns agree"
    ))
}

fn criterion_9() -> Outcome {
    let fib = src("cf:1,...").prefix(1 << 14).unwrap();
    let tm = src(TM).prefix(1 << 12).unwrap();
    ensure(lexarray::is_k_balanced(&fib, 1), || {
        "Fibonacci prefix is not 1-balanced".into()
    })?;
    ensure(lexarray::is_k_balanced(&tm, 2), || {
        "Thue-Morse prefix is not 2-balanced".into()
    })?;
    ensure(!lexarray::is_k_balanced(&tm, 1), || {
        "Thue-Morse prefix is 1-balanced".into()
    })?;
    Ok("Fibonacci 2^14 is 1-balanced; Thue-Morse 2^12 is 2-balanced, not 1-balanced".into())
}

fn criterion_10() -> Outcome {
    let policy = StabilizationPolicy::new(4096, 2, 1 << 18).unwrap();
    let mut missing = Vec::new();
    for name in ["cf:1,...", TM] {
        let word = src(name).prefix(policy.max).unwrap();
        for s in survey(&word, 25, &policy).map_err(|e| e.to_string())? {
            let best = s
                .classes
                .iter()
                .filter_map(|c| c.stable_returns())
                .map(|r| r.len())
                .max()
                .unwrap_or(0);
            if best < 3 {
                missing.push(format!("{name} n={} (max {best} returns)", s.n));
            }
        }
    }
    ensure(missing.is_empty(), || {
        format!("no class with >= 3 returns at: {}", missing.join(", "))
    })?;
    Ok("every length 1..25 has a class with >= 3 returns for Fibonacci and Thue-Morse".into())
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (id, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {id:>2}: PASS  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2}: FAIL  {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
