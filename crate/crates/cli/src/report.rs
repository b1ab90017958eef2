//! Per-case records, suite reports and their JSON/CSV serializations.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

/// The claim a record checks. Each record carries exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    ConcentrationWindow,
    UpperTail,
    LowerTail,
    DimensionVariance,
    ProxySandwich,
    ProxyMonotone,
    ProxyScaling,
    LipschitzHamming,
    LipschitzL1,
    LogConcaveUpper,
    GaussianLower,
    MixtureUpper,
    PowerLawUpper,
    HistogramUpper,
    HistogramLower,
    MomentPreservation,
    LogConcavePreservation,
    CodecRoundTrip,
    CodecSize,
    StreamBatch,
    EntropyLimit,
    OracleDominance,
    EntropyDecomposition,
    ExcessLossCurve,
    AdversarialExcess,
    CollisionMean,
    UniformityRoc,
    LocalExtremum,
}

impl Claim {
    pub fn as_str(&self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }
}

/// How `statistic` is compared against `bound` and `margin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `statistic ≤ bound + margin`.
    AtMost,
    /// `statistic ≥ bound − margin`.
    AtLeast,
    /// `|statistic − bound| ≤ margin`.
    Within,
    /// The case could not be evaluated; always a failure.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub suite: String,
    pub case: String,
    pub claim: Claim,
    pub family: String,
    pub n: u64,
    pub relation: Relation,
    /// Raw statistic, before any margin.
    pub statistic: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    pub detail: String,
}

impl CaseRecord {
    #[allow(clippy::too_many_arguments)]
    fn new(
        claim: Claim,
        family: impl fmt::Display,
        n: u64,
        relation: Relation,
        statistic: f64,
        bound: f64,
        margin: f64,
    ) -> Self {
        let pass = match relation {
            Relation::AtMost => statistic <= bound + margin,
            Relation::AtLeast => statistic >= bound - margin,
            Relation::Within => (statistic - bound).abs() <= margin,
            Relation::Error => false,
        };
        CaseRecord {
            suite: String::new(),
            case: String::new(),
            claim,
            family: family.to_string(),
            n,
            relation,
            statistic,
            bound,
            margin,
            pass,
            detail: String::new(),
        }
    }

    pub fn at_most(claim: Claim, family: impl fmt::Display, n: u64, statistic: f64, bound: f64, margin: f64) -> Self {
        Self::new(claim, family, n, Relation::AtMost, statistic, bound, margin)
    }

    pub fn at_least(claim: Claim, family: impl fmt::Display, n: u64, statistic: f64, bound: f64, margin: f64) -> Self {
        Self::new(claim, family, n, Relation::AtLeast, statistic, bound, margin)
    }

    pub fn within(claim: Claim, family: impl fmt::Display, n: u64, statistic: f64, target: f64, margin: f64) -> Self {
        Self::new(claim, family, n, Relation::Within, statistic, target, margin)
    }

    pub fn error(claim: Claim, family: impl fmt::Display, n: u64, err: impl fmt::Display) -> Self {
        let mut r = Self::new(claim, family, n, Relation::Error, f64::NAN, f64::NAN, 0.0);
        r.detail = err.to_string();
        r
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub records: Vec<CaseRecord>,
    pub passed: usize,
    pub total: usize,
    /// 1 for an empty report.
    pub pass_rate: f64,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl SuiteReport {
    /// Numbers cases in order and computes the summary.
    pub fn new(suite: &str, seed: u64, mut records: Vec<CaseRecord>, wall_clock: Duration) -> Self {
        for (i, r) in records.iter_mut().enumerate() {
            r.suite = suite.to_string();
            r.case = format!("{suite}-{i:04}");
        }
        let total = records.len();
        let passed = records.iter().filter(|r| r.pass).count();
        SuiteReport {
            suite: suite.to_string(),
            seed,
            records,
            passed,
            total,
            pass_rate: if total == 0 { 1.0 } else { passed as f64 / total as f64 },
            wall_clock,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format '{other}'")),
        }
    }
}

/// CSV row; column order is the documented schema.
#[derive(Serialize)]
struct Row<'a> {
    suite: &'a str,
    case: &'a str,
    claim: String,
    family: &'a str,
    n: u64,
    relation: Relation,
    statistic: f64,
    bound: f64,
    margin: f64,
    pass: bool,
    detail: &'a str,
}

pub fn write_report<W: Write>(report: &SuiteReport, format: ReportFormat, out: W) -> anyhow::Result<()> {
    match format {
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if report.records.is_empty() {
                w.write_record([
                    "suite", "case", "claim", "family", "n", "relation", "statistic", "bound", "margin", "pass", "detail",
                ])?;
            }
            for r in &report.records {
                w.serialize(Row {
                    suite: &r.suite,
                    case: &r.case,
                    claim: r.claim.as_str(),
                    family: &r.family,
                    n: r.n,
                    relation: r.relation,
                    statistic: r.statistic,
                    bound: r.bound,
                    margin: r.margin,
                    pass: r.pass,
                    detail: &r.detail,
                })?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn emit_report(report: &SuiteReport, format: ReportFormat, path: &Path) -> anyhow::Result<()> {
    let file = std::fs::File::create(path)?;
    write_report(report, format, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(CaseRecord::at_most(Claim::CodecSize, "x", 1, 1.0, 1.0, 0.0).pass);
        assert!(!CaseRecord::at_most(Claim::CodecSize, "x", 1, 1.1, 1.0, 0.05).pass);
        assert!(CaseRecord::at_least(Claim::GaussianLower, "x", 1, 0.96, 1.0, 0.05).pass);
        assert!(CaseRecord::within(Claim::CollisionMean, "x", 1, 0.9, 1.0, 0.1).pass);
        assert!(!CaseRecord::error(Claim::CodecSize, "x", 1, "boom").pass);
        assert!(!CaseRecord::at_most(Claim::CodecSize, "x", 1, f64::NAN, 1.0, 0.0).pass);
    }

    #[test]
    fn empty_report() {
        let r = SuiteReport::new("proxy", 7, vec![], Duration::ZERO);
        assert_eq!(r.total, 0);
        assert_eq!(r.pass_rate, 1.0);
        let mut buf = Vec::new();
        write_report(&r, ReportFormat::Csv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "suite,case,claim,family,n,relation,statistic,bound,margin,pass,detail\n"
        );
    }

    #[test]
    fn csv_schema() {
        let recs = vec![CaseRecord::at_most(Claim::CodecSize, "uniform:10", 100, 40.0, 64.0, 0.0).with_detail("a,b")];
        let r = SuiteReport::new("compression", 1, recs, Duration::from_secs(3));
        let mut buf = Vec::new();
        write_report(&r, ReportFormat::Csv, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let mut lines = s.lines();
        assert_eq!(
            lines.next().unwrap(),
            "suite,case,claim,family,n,relation,statistic,bound,margin,pass,detail"
        );
        assert_eq!(
            lines.next().unwrap(),
            "compression,compression-0000,codec-size,uniform:10,100,at_most,40.0,64.0,0.0,true,\"a,b\""
        );
        let mut json = Vec::new();
        write_report(&r, ReportFormat::Json, &mut json).unwrap();
        let back: SuiteReport = serde_json::from_slice(&json).unwrap();
        assert_eq!(back.records, r.records);
        assert_eq!(back.wall_clock, Duration::ZERO);
    }
}
