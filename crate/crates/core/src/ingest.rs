//! File formats shared with the command-line tools.
//!
//! Construction specs and hypothesis families are JSON (nested shapes);
//! judgments, learnability reports, correlation summaries, and run traces
//! are CSV with a header row. All writers emit deterministic bytes for
//! identical inputs: rows in a fixed order, floats at six significant
//! digits, `inf`/`-inf` sentinels for unlearnable constructions.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::constructions::ConstructionSpec;
use crate::identification::schedule::Schedule;
use crate::identification::{
    validate_family, Hypothesis, HypothesisFamily, Language, PmfKind, RationalPmf, RunTrace,
};
use crate::learnability::{LearnabilityResult, OccurrencesNeeded, YearsToLearn};
use crate::ratio::parse_rational;
use crate::stats::{CorrelationReport, JudgmentRow};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {detail}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        detail: String,
    },
    #[error("{path}: {detail}")]
    Validation { path: String, detail: String },
}

fn io_err(path: &Path, source: std::io::Error) -> IngestError {
    IngestError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn validation(path: &Path, detail: String) -> IngestError {
    IngestError::Validation {
        path: path.display().to_string(),
        detail,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> IngestError {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or_default();
    match e.kind() {
        csv::ErrorKind::Io(_) => IngestError::Io {
            path: path.display().to_string(),
            source: std::io::Error::other(e.to_string()),
        },
        _ => IngestError::Parse {
            path: path.display().to_string(),
            line,
            column: 0,
            detail: e.to_string(),
        },
    }
}

/// `x` at `sig` significant digits in plain decimal notation; `inf`,
/// `-inf`, and `nan` pass through as sentinels, zero prints as `0`.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    debug_assert!(sig >= 1);
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mut exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(sig as i32 - 1 - exp);
    let rounded = (x * scale).round() / scale;
    // rounding can carry into the next decade (999999.7 → 1000000)
    if rounded.abs() >= 10f64.powi(exp + 1) {
        exp += 1;
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    format!("{rounded:.decimals$}")
}

// ---------------------------------------------------------------- inputs

/// Loads and validates a JSON list of construction specs. Ids must be
/// unique and every spec must pass its structural validation.
pub fn load_constructions(path: &Path) -> Result<Vec<ConstructionSpec>, IngestError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let specs: Vec<ConstructionSpec> =
        serde_json::from_str(&text).map_err(|e| IngestError::Parse {
            path: path.display().to_string(),
            line: e.line(),
            column: e.column(),
            detail: e.to_string(),
        })?;
    for (i, spec) in specs.iter().enumerate() {
        if specs[..i].iter().any(|s| s.id == spec.id) {
            return Err(validation(
                path,
                format!("duplicate construction id {:?}", spec.id),
            ));
        }
        spec.validate()
            .map_err(|e| validation(path, format!("construction {:?}: {e}", spec.id)))?;
    }
    Ok(specs)
}

const JUDGMENT_HEADER: [&str; 4] = [
    "construction_id",
    "mean_grammatical",
    "mean_ungrammatical",
    "n",
];

/// Loads a judgments CSV (`#` starts a comment line). Ratings must lie on
/// the 1–5 scale and construction ids must be unique.
pub fn load_judgments(path: &Path) -> Result<Vec<JudgmentRow>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.iter().ne(JUDGMENT_HEADER) {
        return Err(IngestError::Parse {
            path: path.display().to_string(),
            line: 1,
            column: 0,
            detail: format!(
                "expected header {}, got {:?}",
                JUDGMENT_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut rows: Vec<JudgmentRow> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        let field = |idx: usize| -> Result<&str, IngestError> {
            record.get(idx).ok_or_else(|| IngestError::Parse {
                path: path.display().to_string(),
                line,
                column: idx + 1,
                detail: format!("missing field {:?}", JUDGMENT_HEADER[idx]),
            })
        };
        let parse_f64 = |idx: usize| -> Result<f64, IngestError> {
            field(idx)?.parse().map_err(|_| IngestError::Parse {
                path: path.display().to_string(),
                line,
                column: idx + 1,
                detail: format!("{:?} is not a number", JUDGMENT_HEADER[idx]),
            })
        };
        let row = JudgmentRow {
            construction_id: field(0)?.to_string(),
            mean_grammatical: parse_f64(1)?,
            mean_ungrammatical: parse_f64(2)?,
            n_respondents: field(3)?.parse().map_err(|_| IngestError::Parse {
                path: path.display().to_string(),
                line,
                column: 4,
                detail: "\"n\" is not an integer".into(),
            })?,
        };
        for (label, value) in [
            ("mean_grammatical", row.mean_grammatical),
            ("mean_ungrammatical", row.mean_ungrammatical),
        ] {
            if !(1.0..=5.0).contains(&value) {
                return Err(validation(
                    path,
                    format!(
                        "line {line}: {label} = {value} is outside the 1–5 rating scale"
                    ),
                ));
            }
        }
        if rows.iter().any(|r| r.construction_id == row.construction_id) {
            return Err(validation(
                path,
                format!(
                    "line {line}: duplicate construction id {:?}",
                    row.construction_id
                ),
            ));
        }
        rows.push(row);
    }
    Ok(rows)
}

// ------------------------------------------------------- family files

#[derive(Deserialize)]
struct FamilyFile {
    elements: Vec<String>,
    hypotheses: Vec<HypothesisEntry>,
    true_index: usize,
}

#[derive(Deserialize)]
struct HypothesisEntry {
    masses: Vec<String>,
    schedule: ScheduleEntry,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum ScheduleEntry {
    GeometricGap {
        rate: String,
    },
    /// `steps[element] = [[step, "num/den"], …]`
    Staircase {
        gap: String,
        steps: Vec<Vec<(u64, String)>>,
    },
}

/// Loads a hypothesis-family JSON file: ordered `elements`, per-hypothesis
/// exact `masses` as `"num/den"` strings with a `schedule` (kind
/// `geometric-gap` with `rate`, or `staircase` with `gap` and per-element
/// `steps`), and the 1-based `true_index`. A hypothesis whose masses sum
/// to 1 is a probability; any smaller total marks a semiprobability.
pub fn load_family(path: &Path) -> Result<HypothesisFamily, IngestError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: FamilyFile = serde_json::from_str(&text).map_err(|e| IngestError::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        detail: e.to_string(),
    })?;

    let mut hypotheses = Vec::with_capacity(file.hypotheses.len());
    for (i, entry) in file.hypotheses.into_iter().enumerate() {
        let rational = |s: &str, role: &str| {
            parse_rational(s).map_err(|e| {
                validation(path, format!("hypothesis {}: {role} {s:?}: {e}", i + 1))
            })
        };
        let mut masses = Vec::with_capacity(entry.masses.len());
        for m in &entry.masses {
            masses.push(rational(m, "mass")?);
        }
        let total: num_rational::BigRational = masses.iter().sum();
        let kind = if total == num_rational::BigRational::from_integer(1.into()) {
            PmfKind::Probability
        } else {
            PmfKind::Semiprobability
        };
        let schedule = match entry.schedule {
            ScheduleEntry::GeometricGap { rate } => Schedule::GeometricGap {
                rate: rational(&rate, "rate")?,
            },
            ScheduleEntry::Staircase { gap, steps } => {
                let mut rows = Vec::with_capacity(steps.len());
                for table in &steps {
                    let mut row = Vec::with_capacity(table.len());
                    for (step, value) in table {
                        row.push((*step, rational(value, "staircase value")?));
                    }
                    rows.push(row);
                }
                Schedule::Staircase {
                    rows,
                    gap: rational(&gap, "gap")?,
                }
            }
        };
        hypotheses.push(Hypothesis {
            pmf: RationalPmf { masses, kind },
            schedule,
        });
    }

    let family = HypothesisFamily {
        language: Language::new(file.elements),
        hypotheses,
        true_index: file.true_index,
    };
    validate_family(&family).map_err(|e| validation(path, e.to_string()))?;
    Ok(family)
}

// ------------------------------------------------------------- reports

const REPORT_HEADER: &str = "construction_id,grammar_delta_bits,savings_bits,O_needed,O_year,N_years,learnability,entrenchment";

/// Writes learnability results sorted by construction id, floats at six
/// significant digits, `inf` for an unlearnable `O_needed`/`N_years` and
/// `-inf` for the corresponding score.
pub fn write_report(path: &Path, results: &[LearnabilityResult]) -> Result<(), IngestError> {
    let mut sorted: Vec<&LearnabilityResult> = results.iter().collect();
    sorted.sort_by(|a, b| a.construction_id.cmp(&b.construction_id));
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in sorted {
        let o_needed = match r.o_needed {
            OccurrencesNeeded::Finite(m) => m.to_string(),
            OccurrencesNeeded::Unlearnable => "inf".into(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.construction_id,
            fmt_sig(r.grammar_delta, 6),
            fmt_sig(r.savings, 6),
            o_needed,
            fmt_sig(r.o_year, 6),
            fmt_sig(r.n_years.as_f64(), 6),
            fmt_sig(r.learnability, 6),
            fmt_sig(r.entrenchment, 6),
        )
        .expect("writing to String cannot fail");
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Reads a report back; values carry the file's six-digit precision.
pub fn read_report(path: &Path) -> Result<Vec<LearnabilityResult>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.iter().ne(REPORT_HEADER.split(',')) {
        return Err(IngestError::Parse {
            path: path.display().to_string(),
            line: 1,
            column: 0,
            detail: format!("expected header {REPORT_HEADER}"),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        let parse_err = |column: usize, detail: String| IngestError::Parse {
            path: path.display().to_string(),
            line,
            column,
            detail,
        };
        let get = |idx: usize| record.get(idx).unwrap_or_default().to_string();
        let num = |idx: usize| -> Result<f64, IngestError> {
            record
                .get(idx)
                .unwrap_or_default()
                .parse()
                .map_err(|_| parse_err(idx + 1, "not a number".into()))
        };
        let o_needed = match record.get(3).unwrap_or_default() {
            "inf" => OccurrencesNeeded::Unlearnable,
            s => OccurrencesNeeded::Finite(
                s.parse()
                    .map_err(|_| parse_err(4, "O_needed is not an integer".into()))?,
            ),
        };
        let n_years = {
            let y = num(5)?;
            if y.is_infinite() {
                YearsToLearn::Unlearnable
            } else {
                YearsToLearn::Finite(y)
            }
        };
        rows.push(LearnabilityResult {
            construction_id: get(0),
            grammar_delta: num(1)?,
            savings: num(2)?,
            o_needed,
            o_year: num(4)?,
            n_years,
            learnability: num(6)?,
            entrenchment: num(7)?,
        });
    }
    Ok(rows)
}

const CORRELATION_HEADER: &str = "variable,r,p,n";

/// Writes correlation rows in the order given (learnability first by
/// convention; callers control the order).
pub fn write_correlations(
    path: &Path,
    reports: &[CorrelationReport],
) -> Result<(), IngestError> {
    let mut out = String::from(CORRELATION_HEADER);
    out.push('\n');
    for report in reports {
        writeln!(
            out,
            "{},{},{},{}",
            report.variable,
            fmt_sig(report.r, 6),
            fmt_sig(report.p_two_tailed, 6),
            report.n_points,
        )
        .expect("writing to String cannot fail");
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_correlations(path: &Path) -> Result<Vec<CorrelationReport>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let headers = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.iter().ne(CORRELATION_HEADER.split(',')) {
        return Err(IngestError::Parse {
            path: path.display().to_string(),
            line: 1,
            column: 0,
            detail: format!("expected header {CORRELATION_HEADER}"),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        let num = |idx: usize| -> Result<f64, IngestError> {
            record
                .get(idx)
                .unwrap_or_default()
                .parse()
                .map_err(|_| IngestError::Parse {
                    path: path.display().to_string(),
                    line,
                    column: idx + 1,
                    detail: "not a number".into(),
                })
        };
        rows.push(CorrelationReport {
            variable: record.get(0).unwrap_or_default().to_string(),
            r: num(1)?,
            p_two_tailed: num(2)?,
            n_points: record
                .get(3)
                .unwrap_or_default()
                .parse()
                .map_err(|_| IngestError::Parse {
                    path: path.display().to_string(),
                    line,
                    column: 4,
                    detail: "n is not an integer".into(),
                })?,
        });
    }
    Ok(rows)
}

/// Writes one run trace: `n,guess,eliminated,epsilon` per step, the
/// eliminated indices ascending and semicolon-joined.
pub fn write_trace(path: &Path, trace: &RunTrace) -> Result<(), IngestError> {
    let mut out = String::from("n,guess,eliminated,epsilon\n");
    for step in &trace.steps {
        let eliminated = step
            .eliminated
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(";");
        writeln!(
            out,
            "{},{},{},{}",
            step.n,
            step.guess,
            eliminated,
            fmt_sig(step.epsilon, 6)
        )
        .expect("writing to String cannot fail");
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identification::{run_identification, IdentificationConfig, StepRecord};
    use tempfile::tempdir;

    fn write_tmp(dir: &tempfile::TempDir, name: &str, content: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, content).unwrap();
        path
    }

    const SPEC_JSON: &str = r#"[
      {
        "id": "going_to",
        "name": "going to V",
        "n_new_symbols": 7,
        "diagnostic": { "context": "before_verb", "form": "contracted" },
        "contexts": [
          {
            "id": "before_verb",
            "options": [
              { "form": "contracted", "allowed": true, "count": 300 },
              { "form": "full", "allowed": true, "count": 600 }
            ]
          },
          {
            "id": "before_noun",
            "options": [
              { "form": "contracted", "allowed": false, "count": 0 },
              { "form": "full", "allowed": true, "count": 100 }
            ]
          }
        ]
      }
    ]"#;

    #[test]
    fn constructions_load_and_validate() {
        let dir = tempdir().unwrap();
        let path = write_tmp(&dir, "c.json", SPEC_JSON);
        let specs = load_constructions(&path).unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].id, "going_to");
        assert_eq!(specs[0].diagnostic_count(), 300);

        // empty file: parse error, not a silent empty list
        let empty = write_tmp(&dir, "empty.json", "");
        assert!(matches!(
            load_constructions(&empty),
            Err(IngestError::Parse { .. })
        ));

        // duplicate ids
        let dup = format!(
            "[{},{}]",
            SPEC_JSON.trim().trim_start_matches('[').trim_end_matches(']'),
            SPEC_JSON.trim().trim_start_matches('[').trim_end_matches(']')
        );
        let dup_path = write_tmp(&dir, "dup.json", &dup);
        let err = load_constructions(&dup_path).unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");

        // diagnostic pointing at a missing form: the error names the construction
        let broken = SPEC_JSON.replace("\"form\": \"contracted\" }", "\"form\": \"nope\" }");
        let broken_path = write_tmp(&dir, "broken.json", &broken);
        let err = load_constructions(&broken_path).unwrap_err();
        assert!(matches!(err, IngestError::Validation { .. }));
        assert!(err.to_string().contains("going_to"), "{err}");
    }

    #[test]
    fn judgments_load_with_comments_and_validate() {
        let dir = tempdir().unwrap();
        let path = write_tmp(
            &dir,
            "j.csv",
            "construction_id,mean_grammatical,mean_ungrammatical,n\n\
             # pair: I'm gonna leave / I'm gonna the store\n\
             going_to,4.6,1.3,97\n\
             want_to,4.4,2.1,97\n",
        );
        let rows = load_judgments(&path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].construction_id, "going_to");
        assert_eq!(rows[0].n_respondents, 97);

        let bad_scale = write_tmp(
            &dir,
            "bad.csv",
            "construction_id,mean_grammatical,mean_ungrammatical,n\nx,6.0,1.0,10\n",
        );
        let err = load_judgments(&bad_scale).unwrap_err();
        assert!(err.to_string().contains("rating scale"), "{err}");

        let dup = write_tmp(
            &dir,
            "dup.csv",
            "construction_id,mean_grammatical,mean_ungrammatical,n\nx,4.0,1.0,10\nx,3.0,2.0,10\n",
        );
        assert!(load_judgments(&dup)
            .unwrap_err()
            .to_string()
            .contains("duplicate"));

        let bad_header = write_tmp(&dir, "h.csv", "id,a,b,n\nx,4.0,1.0,10\n");
        assert!(matches!(
            load_judgments(&bad_header),
            Err(IngestError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(1.0, 6), "1.00000");
        assert_eq!(fmt_sig(-1.5, 6), "-1.50000");
        assert_eq!(fmt_sig(1234567.0, 6), "1234570");
        assert_eq!(fmt_sig(0.000123456789, 6), "0.000123457");
        assert_eq!(fmt_sig(999999.7, 6), "1000000");
        assert_eq!(fmt_sig(f64::INFINITY, 6), "inf");
        assert_eq!(fmt_sig(f64::NEG_INFINITY, 6), "-inf");
        assert_eq!(fmt_sig(3.851234e3, 4), "3851");
    }

    #[test]
    fn report_round_trip_and_sentinels() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("report.csv");
        let results = vec![
            LearnabilityResult {
                construction_id: "zz_last".into(),
                grammar_delta: 116.26748332105768,
                savings: 0.1827488286055068,
                o_needed: OccurrencesNeeded::Finite(637),
                o_year: 10.0,
                n_years: YearsToLearn::Finite(63.7),
                learnability: -1.8041394323353504,
                entrenchment: 1.0,
            },
            LearnabilityResult {
                construction_id: "aa_first".into(),
                grammar_delta: 40.0,
                savings: -0.25,
                o_needed: OccurrencesNeeded::Unlearnable,
                o_year: 2.5,
                n_years: YearsToLearn::Unlearnable,
                learnability: f64::NEG_INFINITY,
                entrenchment: 0.3979400086720376,
            },
        ];
        write_report(&path, &results).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(REPORT_HEADER));
        // sorted by id: the unlearnable row comes first
        let first = lines.next().unwrap();
        assert!(first.starts_with("aa_first,"), "{first}");
        assert!(first.contains(",inf,"), "{first}");
        assert!(first.contains(",-inf,"), "{first}");

        let back = read_report(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].o_needed, OccurrencesNeeded::Unlearnable);
        assert_eq!(back[0].learnability, f64::NEG_INFINITY);
        assert_eq!(back[1].o_needed, OccurrencesNeeded::Finite(637));
        // write∘read is idempotent at formatting precision
        let path2 = dir.path().join("report2.csv");
        write_report(&path2, &back).unwrap();
        assert_eq!(text, fs::read_to_string(&path2).unwrap());
    }

    #[test]
    fn correlations_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("correlations.csv");
        let reports = vec![
            CorrelationReport {
                variable: "learnability".into(),
                r: 0.35,
                p_two_tailed: 0.1684516554061867,
                n_points: 17,
            },
            CorrelationReport {
                variable: "entrenchment".into(),
                r: -0.08,
                p_two_tailed: 0.760203713656395,
                n_points: 17,
            },
        ];
        write_correlations(&path, &reports).unwrap();
        let back = read_correlations(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].variable, "learnability");
        assert!((back[0].r - 0.35).abs() < 1e-9);
        assert!((back[1].p_two_tailed - 0.760204).abs() < 1e-9);
        assert_eq!(back[1].n_points, 17);
    }

    const FAMILY_JSON: &str = r#"{
      "elements": ["a", "b"],
      "hypotheses": [
        { "masses": ["1/2", "1/2"], "schedule": { "kind": "geometric-gap", "rate": "1/2" } },
        { "masses": ["1/5", "3/5"], "schedule": { "kind": "geometric-gap", "rate": "1/2" } },
        {
          "masses": ["9/10", "1/10"],
          "schedule": {
            "kind": "staircase",
            "gap": "0",
            "steps": [[[0, "1/2"], [3, "9/10"]], [[0, "1/10"]]]
          }
        }
      ],
      "true_index": 3
    }"#;

    #[test]
    fn family_loads_with_inferred_kinds() {
        let dir = tempdir().unwrap();
        let path = write_tmp(&dir, "family.json", FAMILY_JSON);
        let family = load_family(&path).unwrap();
        assert_eq!(family.len(), 3);
        assert_eq!(family.true_index, 3);
        assert_eq!(family.hypotheses[0].pmf.kind, PmfKind::Probability);
        // Σ = 4/5 < 1: a semiprobability, fine off the true index
        assert_eq!(family.hypotheses[1].pmf.kind, PmfKind::Semiprobability);
        assert!(matches!(
            family.hypotheses[2].schedule,
            Schedule::Staircase { .. }
        ));
    }

    #[test]
    fn family_errors_are_specific() {
        let dir = tempdir().unwrap();
        // bad rational text
        let bad_mass = FAMILY_JSON.replace("\"1/2\", \"1/2\"", "\"1/x\", \"1/2\"");
        let p = write_tmp(&dir, "m.json", &bad_mass);
        let err = load_family(&p).unwrap_err();
        assert!(err.to_string().contains("hypothesis 1"), "{err}");

        // rate outside (0,1) surfaces the family validation message
        let bad_rate = FAMILY_JSON.replacen("\"rate\": \"1/2\"", "\"rate\": \"3/2\"", 1);
        let p = write_tmp(&dir, "r.json", &bad_rate);
        let err = load_family(&p).unwrap_err();
        assert!(err.to_string().contains("rate"), "{err}");

        // true index out of range
        let bad_idx = FAMILY_JSON.replace("\"true_index\": 3", "\"true_index\": 9");
        let p = write_tmp(&dir, "i.json", &bad_idx);
        assert!(matches!(
            load_family(&p),
            Err(IngestError::Validation { .. })
        ));

        // malformed JSON reports position
        let p = write_tmp(&dir, "j.json", "{ not json");
        assert!(matches!(load_family(&p), Err(IngestError::Parse { .. })));
    }

    #[test]
    fn trace_format_is_stable() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        let trace = RunTrace {
            steps: vec![
                StepRecord {
                    n: 1,
                    guess: 1,
                    eliminated: vec![],
                    epsilon: 1.234567,
                },
                StepRecord {
                    n: 2,
                    guess: 3,
                    eliminated: vec![1, 2],
                    epsilon: 0.9,
                },
            ],
            final_guess: Some(3),
            convergence_step: Some(2),
        };
        write_trace(&path, &trace).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "n,guess,eliminated,epsilon\n1,1,,1.23457\n2,3,1;2,0.900000\n"
        );
    }

    #[test]
    fn identical_seeds_write_identical_traces() {
        let dir = tempdir().unwrap();
        let family = crate::identification::test_support::basic_family();
        let config = IdentificationConfig::new(0.05, 60, 17).unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_trace(&a, &run_identification(&family, &config).unwrap()).unwrap();
        write_trace(&b, &run_identification(&family, &config).unwrap()).unwrap();
        assert_eq!(
            fs::read_to_string(&a).unwrap(),
            fs::read_to_string(&b).unwrap()
        );
    }
}
