//! Benchmark report: one meta line and one row per level, as line-delimited
//! `key=value` records chosen for diff-ability. Values are percent-escaped so
//! arbitrary model paths round-trip through the reader.

use std::fmt::Write as _;

use qmle_core::{OptLevel, SearchStats};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfigEcho {
    pub beam: Option<u32>,
    pub pq_limit: usize,
    pub det_penalty: f64,
    pub no_revisit: bool,
    pub at_most_two: bool,
    pub hash_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub level: OptLevel,
    pub shots: usize,
    pub cpu_seconds: f64,
    /// Relative to the first row's time; exactly 1.0 on the first row.
    pub speedup: f64,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub model: String,
    pub shots: usize,
    pub seed: u64,
    pub repeats: usize,
    pub config: BenchConfigEcho,
    pub timestamp_unix: u64,
    pub rows: Vec<BenchRow>,
}

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for b in value.bytes() {
        match b {
            b'%' | b' ' | b'=' | b'\n' | b'\t' => {
                let _ = write!(out, "%{b:02x}");
            }
            _ => out.push(b as char),
        }
    }
    out
}

fn unescape(token: &str) -> Result<String, String> {
    let bytes = token.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes
                .get(i + 1..i + 3)
                .ok_or_else(|| format!("truncated escape in `{token}`"))?;
            let hex = std::str::from_utf8(hex).map_err(|_| format!("bad escape in `{token}`"))?;
            out.push(
                u8::from_str_radix(hex, 16).map_err(|_| format!("bad escape in `{token}`"))?,
            );
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| format!("escape decodes to invalid UTF-8 in `{token}`"))
}

fn fields(line: &str) -> Result<Vec<(String, String)>, String> {
    line.split_ascii_whitespace()
        .map(|tok| {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{tok}`"))?;
            Ok((k.to_string(), unescape(v)?))
        })
        .collect()
}

struct FieldMap(std::collections::HashMap<String, String>);

impl FieldMap {
    fn new(line: &str) -> Result<FieldMap, String> {
        Ok(FieldMap(fields(line)?.into_iter().collect()))
    }

    fn take(&mut self, key: &str) -> Result<String, String> {
        self.0.remove(key).ok_or_else(|| format!("missing field `{key}`"))
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, String> {
        let raw = self.take(key)?;
        raw.parse().map_err(|_| format!("field `{key}`: cannot parse `{raw}`"))
    }
}

impl BenchReport {
    pub fn to_machine_rows(&self) -> String {
        let mut out = String::new();
        let beam = match self.config.beam {
            Some(b) => b.to_string(),
            None => "inf".to_string(),
        };
        let _ = writeln!(
            out,
            "meta model={} shots={} seed={} repeats={} beam={} pq_limit={} det_penalty={} \
             no_revisit={} at_most_two={} hash_seed={} timestamp={}",
            escape(&self.model),
            self.shots,
            self.seed,
            self.repeats,
            beam,
            self.config.pq_limit,
            self.config.det_penalty,
            self.config.no_revisit,
            self.config.at_most_two,
            self.config.hash_seed,
            self.timestamp_unix,
        );
        for row in &self.rows {
            let s = &row.stats;
            let _ = writeln!(
                out,
                "row level={} shots={} cpu_s={} speedup={} nodes_expanded={} \
                 nodes_pruned_beam={} nodes_pruned_visited={} nodes_pruned_blocked={} \
                 detcost_calls={} detcost_loop_iterations={} detcost_early_exits={} \
                 max_queue_size={}",
                row.level,
                row.shots,
                row.cpu_seconds,
                row.speedup,
                s.nodes_expanded,
                s.nodes_pruned_beam,
                s.nodes_pruned_visited,
                s.nodes_pruned_blocked,
                s.detcost_calls,
                s.detcost_loop_iterations,
                s.detcost_early_exits,
                s.max_queue_size,
            );
        }
        out
    }

    pub fn from_machine_rows(text: &str) -> Result<BenchReport, String> {
        let mut meta: Option<BenchReport> = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
            match tag {
                "meta" => {
                    if meta.is_some() {
                        return Err(format!("line {}: duplicate meta line", i + 1));
                    }
                    let mut f = FieldMap::new(rest).map_err(|e| format!("line {}: {e}", i + 1))?;
                    let beam_raw = f.take("beam").map_err(|e| format!("line {}: {e}", i + 1))?;
                    let beam = if beam_raw == "inf" {
                        None
                    } else {
                        Some(beam_raw.parse().map_err(|_| {
                            format!("line {}: field `beam`: cannot parse `{beam_raw}`", i + 1)
                        })?)
                    };
                    let report = (|| -> Result<BenchReport, String> {
                        Ok(BenchReport {
                            model: f.take("model")?,
                            shots: f.parse("shots")?,
                            seed: f.parse("seed")?,
                            repeats: f.parse("repeats")?,
                            config: BenchConfigEcho {
                                beam,
                                pq_limit: f.parse("pq_limit")?,
                                det_penalty: f.parse("det_penalty")?,
                                no_revisit: f.parse("no_revisit")?,
                                at_most_two: f.parse("at_most_two")?,
                                hash_seed: f.parse("hash_seed")?,
                            },
                            timestamp_unix: f.parse("timestamp")?,
                            rows: Vec::new(),
                        })
                    })()
                    .map_err(|e| format!("line {}: {e}", i + 1))?;
                    meta = Some(report);
                }
                "row" => {
                    let report = meta
                        .as_mut()
                        .ok_or_else(|| format!("line {}: row before meta", i + 1))?;
                    let mut f = FieldMap::new(rest).map_err(|e| format!("line {}: {e}", i + 1))?;
                    let row = (|| -> Result<BenchRow, String> {
                        Ok(BenchRow {
                            level: f.parse("level")?,
                            shots: f.parse("shots")?,
                            cpu_seconds: f.parse("cpu_s")?,
                            speedup: f.parse("speedup")?,
                            stats: SearchStats {
                                nodes_expanded: f.parse("nodes_expanded")?,
                                nodes_pruned_beam: f.parse("nodes_pruned_beam")?,
                                nodes_pruned_visited: f.parse("nodes_pruned_visited")?,
                                nodes_pruned_blocked: f.parse("nodes_pruned_blocked")?,
                                detcost_calls: f.parse("detcost_calls")?,
                                detcost_loop_iterations: f.parse("detcost_loop_iterations")?,
                                detcost_early_exits: f.parse("detcost_early_exits")?,
                                max_queue_size: f.parse("max_queue_size")?,
                            },
                        })
                    })()
                    .map_err(|e| format!("line {}: {e}", i + 1))?;
                    report.rows.push(row);
                }
                other => return Err(format!("line {}: unknown record `{other}`", i + 1)),
            }
        }
        meta.ok_or_else(|| "no meta line found".to_string())
    }

    pub fn human_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "model {}  shots {}  seed {}  repeats {} (min time reported)",
            self.model, self.shots, self.seed, self.repeats
        );
        let _ = writeln!(
            out,
            "{:<6} {:>12} {:>9} {:>12} {:>14} {:>12} {:>10}",
            "level", "cpu_s", "speedup", "expanded", "detcost_calls", "early_exits", "max_queue"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<6} {:>12.6} {:>9.3} {:>12} {:>14} {:>12} {:>10}",
                row.level.to_string(),
                row.cpu_seconds,
                row.speedup,
                row.stats.nodes_expanded,
                row.stats.detcost_calls,
                row.stats.detcost_early_exits,
                row.stats.max_queue_size,
            );
        }
        out
    }
}
