//! Labeled symmetric distance matrices over a corpus, and their CSV form.
//!
//! The CSV layout is one header row `,label1,label2,...` followed by one row
//! per text, `labelK,v,v,...`, values printed with six decimals, diagonal
//! exactly zero. Reading validates the full contract and reports the 1-based
//! row/column of the first violation.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::distance::symmetric_distance_sweep;
use crate::error::{Error, Result};
use crate::phrase::Discount;
use crate::text::Text;

/// Symmetric matrix of pairwise distances with per-text labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates shape, symmetry, the zero diagonal, and the [0, 1] range.
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<DistanceMatrix> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::TooFewTexts { n, min: 2 });
        }
        if values.len() != n * n {
            return Err(Error::MatrixFormat {
                row: 1,
                col: 1,
                reason: format!("{} values do not fill {n} x {n}", values.len()),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = values[i * n + j];
                // Report positions in CSV coordinates: header is row 1,
                // label column is column 1.
                let (row, col) = (i + 2, j + 2);
                if !v.is_finite() {
                    return Err(Error::MatrixFormat {
                        row,
                        col,
                        reason: format!("non-finite value {v}"),
                    });
                }
                if i == j && v != 0.0 {
                    return Err(Error::MatrixFormat {
                        row,
                        col,
                        reason: format!("diagonal must be 0, got {v}"),
                    });
                }
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::MatrixFormat {
                        row,
                        col,
                        reason: format!("value {v} outside [0, 1]"),
                    });
                }
                if j > i && (values[i * n + j] - values[j * n + i]).abs() > 0.0 {
                    return Err(Error::MatrixFormat {
                        row: j + 2,
                        col: i + 2,
                        reason: format!(
                            "not symmetric: {} differs from {} at row {}, column {}",
                            values[j * n + i],
                            values[i * n + j],
                            i + 2,
                            j + 2
                        ),
                    });
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        Ok(DistanceMatrix { labels, n, values })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Writes the CSV form with six-decimal values.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        let mut header = Vec::with_capacity(self.n + 1);
        header.push(String::new());
        header.extend(self.labels.iter().cloned());
        writer.write_record(&header).map_err(csv_error)?;
        for i in 0..self.n {
            let mut record = Vec::with_capacity(self.n + 1);
            record.push(self.labels[i].clone());
            for j in 0..self.n {
                record.push(format!("{:.6}", self.get(i, j)));
            }
            writer.write_record(&record).map_err(csv_error)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// The CSV form as a string.
    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    /// Parses and validates the CSV form. Row/column coordinates in errors
    /// are 1-based with the header as row 1.
    pub fn from_csv_reader<R: Read>(input: R) -> Result<DistanceMatrix> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(input);
        let mut records = reader.records();
        let header = match records.next() {
            Some(r) => r.map_err(|e| Error::MatrixFormat {
                row: 1,
                col: 1,
                reason: e.to_string(),
            })?,
            None => {
                return Err(Error::MatrixFormat {
                    row: 1,
                    col: 1,
                    reason: "empty input".to_owned(),
                })
            }
        };
        if header.len() < 3 {
            return Err(Error::MatrixFormat {
                row: 1,
                col: header.len(),
                reason: "header must list at least two labels".to_owned(),
            });
        }
        if !header[0].is_empty() {
            return Err(Error::MatrixFormat {
                row: 1,
                col: 1,
                reason: format!("corner cell must be empty, got '{}'", &header[0]),
            });
        }
        let labels: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
        let n = labels.len();

        let mut values = vec![0.0f64; n * n];
        let mut rows_seen = 0usize;
        for (i, record) in records.enumerate() {
            let row_no = i + 2;
            if i >= n {
                return Err(Error::MatrixFormat {
                    row: row_no,
                    col: 1,
                    reason: format!("expected {n} data rows"),
                });
            }
            rows_seen += 1;
            let record = record.map_err(|e| Error::MatrixFormat {
                row: row_no,
                col: 1,
                reason: e.to_string(),
            })?;
            if record.len() != n + 1 {
                return Err(Error::MatrixFormat {
                    row: row_no,
                    col: record.len(),
                    reason: format!("expected {} fields, got {}", n + 1, record.len()),
                });
            }
            if record[0] != labels[i] {
                return Err(Error::MatrixFormat {
                    row: row_no,
                    col: 1,
                    reason: format!(
                        "row label '{}' does not match header label '{}'",
                        &record[0], labels[i]
                    ),
                });
            }
            for j in 0..n {
                let field = &record[j + 1];
                values[i * n + j] = field.parse::<f64>().map_err(|_| Error::MatrixFormat {
                    row: row_no,
                    col: j + 2,
                    reason: format!("not a number: '{field}'"),
                })?;
            }
        }
        if rows_seen != n {
            return Err(Error::MatrixFormat {
                row: rows_seen + 2,
                col: 1,
                reason: format!("expected {n} data rows, got {rows_seen}"),
            });
        }
        Self::new(labels, values)
    }

    /// Parses the CSV form from a string.
    pub fn from_csv_str(s: &str) -> Result<DistanceMatrix> {
        Self::from_csv_reader(s.as_bytes())
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Internal(format!("csv: {other:?}")),
    }
}

fn validate_corpus(corpus: &[Text]) -> Result<()> {
    if corpus.len() < 2 {
        return Err(Error::TooFewTexts {
            n: corpus.len(),
            min: 2,
        });
    }
    let mut seen = std::collections::HashSet::new();
    for t in corpus {
        if t.is_empty() {
            return Err(Error::EmptyText {
                id: t.id().to_owned(),
            });
        }
        if !seen.insert(t.id()) {
            return Err(Error::DuplicateLabel {
                label: t.id().to_owned(),
            });
        }
    }
    Ok(())
}

fn pair_indices(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// One symmetrized distance per pair `(i, j)`, `i < j`, in pair-index order,
/// for each discount factor: `results[lambda_index][pair_index]`.
fn compute_pairs(corpus: &[Text], lambdas: &[Discount]) -> Result<Vec<Vec<f64>>> {
    let pairs = pair_indices(corpus.len());
    let per_pair: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| symmetric_distance_sweep(&corpus[i], &corpus[j], lambdas))
        .collect::<Result<_>>()?;
    let mut per_lambda = vec![vec![0.0f64; pairs.len()]; lambdas.len()];
    for (pair_idx, values) in per_pair.iter().enumerate() {
        for (lambda_idx, &v) in values.iter().enumerate() {
            per_lambda[lambda_idx][pair_idx] = v;
        }
    }
    Ok(per_lambda)
}

fn assemble(corpus: &[Text], pair_values: &[f64]) -> Result<DistanceMatrix> {
    let n = corpus.len();
    let mut values = vec![0.0f64; n * n];
    for (&(i, j), &v) in pair_indices(n).iter().zip(pair_values) {
        values[i * n + j] = v;
        values[j * n + i] = v;
    }
    DistanceMatrix::new(corpus.iter().map(|t| t.id().to_owned()).collect(), values)
}

/// Pairwise symmetrized distances over a corpus, parallelized over pairs on
/// the current thread pool. The result does not depend on the scheduling.
pub fn pairwise_matrix(corpus: &[Text], d: Discount) -> Result<DistanceMatrix> {
    validate_corpus(corpus)?;
    let per_lambda = compute_pairs(corpus, &[d])?;
    assemble(corpus, &per_lambda[0])
}

/// Like [`pairwise_matrix`] with a bounded worker pool of `jobs` threads.
pub fn pairwise_matrix_with_jobs(
    corpus: &[Text],
    d: Discount,
    jobs: usize,
) -> Result<DistanceMatrix> {
    let matrices = pairwise_matrix_sweep(corpus, &[d], jobs)?;
    Ok(matrices
        .into_iter()
        .next()
        .expect("one lambda in, one matrix out"))
}

/// One matrix per discount factor, computed in a single pass over the pairs
/// with a bounded worker pool of `jobs` threads (`jobs = 0` means one worker
/// per available core).
pub fn pairwise_matrix_sweep(
    corpus: &[Text],
    lambdas: &[Discount],
    jobs: usize,
) -> Result<Vec<DistanceMatrix>> {
    validate_corpus(corpus)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
    let per_lambda = pool.install(|| compute_pairs(corpus, lambdas))?;
    per_lambda
        .iter()
        .map(|pair_values| assemble(corpus, pair_values))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::symmetric_distance;
    use crate::text::{tokenize, TokenizeOptions};

    fn text(id: &str, raw: &str) -> Text {
        tokenize(id, raw, &TokenizeOptions::default()).unwrap()
    }

    fn lam(l: f64) -> Discount {
        Discount::new(l).unwrap()
    }

    #[test]
    fn two_identical_texts_give_the_self_distance() {
        let corpus = [text("a", "one two three"), text("b", "one two three")];
        let m = pairwise_matrix(&corpus, lam(0.8)).unwrap();
        let want = 0.8 * (1.0 - 0.8f64.powi(3)) / (3.0 * 0.2);
        assert!((m.get(0, 1) - want).abs() < 1e-12);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn disjoint_vocabulary_at_zero_discount() {
        let corpus = [
            text("a", "aa bb"),
            text("b", "cc dd"),
            text("c", "ee ff gg"),
        ];
        let m = pairwise_matrix(&corpus, Discount::ZERO).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
    }

    #[test]
    fn entries_match_individual_pair_calls() {
        let corpus = [
            text("a", "the lazy fox"),
            text("b", "the quick fox jumps over the lazy dog"),
            text("c", "man bites dog"),
        ];
        let m = pairwise_matrix(&corpus, lam(0.8)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let single = symmetric_distance(&corpus[i], &corpus[j], lam(0.8))
                        .unwrap()
                        .value;
                    assert_eq!(m.get(i, j).to_bits(), single.to_bits());
                }
            }
        }
    }

    #[test]
    fn duplicate_ids_and_empty_texts_are_rejected() {
        let dup = [text("a", "aa bb"), text("a", "cc dd")];
        assert!(matches!(
            pairwise_matrix(&dup, Discount::ZERO),
            Err(Error::DuplicateLabel { .. })
        ));
        let empty = [text("a", "aa bb"), text("b", "")];
        match pairwise_matrix(&empty, Discount::ZERO) {
            Err(Error::EmptyText { id }) => assert_eq!(id, "b"),
            other => panic!("unexpected: {other:?}"),
        }
        let single = [text("a", "aa bb")];
        assert!(matches!(
            pairwise_matrix(&single, Discount::ZERO),
            Err(Error::TooFewTexts { n: 1, min: 2 })
        ));
    }

    #[test]
    fn job_count_does_not_change_the_result() {
        let corpus: Vec<Text> = (0..6)
            .map(|i| {
                let words: Vec<String> = (0..20)
                    .map(|k| {
                        let c = (b'a' + ((i * 7 + k * 3) % 13) as u8) as char;
                        format!("w{c}")
                    })
                    .collect();
                text(&format!("t{i}"), &words.join(" "))
            })
            .collect();
        let one = pairwise_matrix_with_jobs(&corpus, lam(0.8), 1).unwrap();
        let eight = pairwise_matrix_with_jobs(&corpus, lam(0.8), 8).unwrap();
        assert_eq!(one.to_csv_string(), eight.to_csv_string());
    }

    #[test]
    fn csv_round_trip() {
        let corpus = [
            text("alpha.txt", "aa bb cc"),
            text("beta.txt", "aa bb dd"),
            text("gamma.txt", "ee ff"),
        ];
        let m = pairwise_matrix(&corpus, lam(0.4)).unwrap();
        let csv = m.to_csv_string();
        let parsed = DistanceMatrix::from_csv_str(&csv).unwrap();
        assert_eq!(parsed.labels(), m.labels());
        // Values survive at six decimals.
        for i in 0..3 {
            for j in 0..3 {
                assert!((parsed.get(i, j) - m.get(i, j)).abs() < 5e-7);
            }
        }
        // A second trip is exact: six decimals are already fixed.
        assert_eq!(parsed.to_csv_string(), csv);
    }

    #[test]
    fn csv_labels_with_commas_survive() {
        let m = DistanceMatrix::new(vec!["a,x".into(), "b".into()], vec![0.0, 0.25, 0.25, 0.0])
            .unwrap();
        let parsed = DistanceMatrix::from_csv_str(&m.to_csv_string()).unwrap();
        assert_eq!(parsed.labels(), m.labels());
    }

    #[test]
    fn malformed_csv_reports_position() {
        // Asymmetric entry.
        let asym = ",a,b\na,0.000000,0.300000\nb,0.400000,0.000000\n";
        match DistanceMatrix::from_csv_str(asym) {
            Err(Error::MatrixFormat { row: 3, col: 2, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        // Non-numeric entry.
        let nonnum = ",a,b\na,0.000000,x\nb,0.300000,0.000000\n";
        match DistanceMatrix::from_csv_str(nonnum) {
            Err(Error::MatrixFormat {
                row: 2,
                col: 3,
                reason,
            }) => {
                assert!(reason.contains("not a number"));
            }
            other => panic!("unexpected: {other:?}"),
        }
        // Bad diagonal.
        let diag = ",a,b\na,0.100000,0.300000\nb,0.300000,0.000000\n";
        match DistanceMatrix::from_csv_str(diag) {
            Err(Error::MatrixFormat {
                row: 2,
                col: 2,
                reason,
            }) => {
                assert!(reason.contains("diagonal"));
            }
            other => panic!("unexpected: {other:?}"),
        }
        // Out-of-range value.
        let range = ",a,b\na,0.000000,1.500000\nb,1.500000,0.000000\n";
        assert!(matches!(
            DistanceMatrix::from_csv_str(range),
            Err(Error::MatrixFormat { .. })
        ));
        // Wrong field count.
        let short = ",a,b\na,0.000000\nb,0.300000,0.000000\n";
        assert!(matches!(
            DistanceMatrix::from_csv_str(short),
            Err(Error::MatrixFormat { row: 2, .. })
        ));
    }
}
