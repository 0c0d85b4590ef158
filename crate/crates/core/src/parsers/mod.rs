//! Instance file readers and writers.
//!
//! Four text formats are supported, all whitespace-tokenised with blank lines
//! ignored and `#` lines treated as comments:
//!
//! * `jsp`: OR-library layout. Header `n m`, then one line per job with `m`
//!   pairs `machine duration`, machines numbered from 0.
//! * `fjsp`: Brandimarte layout. Header `n m [avg_flexibility]`, then one line
//!   per job: operation count, then per operation the number of alternatives
//!   followed by that many `machine duration` pairs, machines numbered from 1.
//! * `fjsp_sdst`: an `fjsp` body followed by `m` setup matrices (one per
//!   machine, in machine order), each `T x T` where `T` is the total
//!   operation count. Rows follow operation global ids. Matrices may be
//!   separated by blank lines.
//! * `fajsp`: an `fjsp` body, a line `assembly`, then zero or more arc lines
//!   `a b` meaning job `a` must finish before job `b` starts (0-based ids).
//!
//! The complete grammar is in `docs/formats.md`.

mod lexer;

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{
    find_cycle, AssemblyArc, Instance, Job, ModelError, Operation, SetupTimes, Variant,
};
pub use lexer::Location;
use lexer::{Cursor, Line, Row};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormatTag {
    Jsp,
    Fjsp,
    FjspSdst,
    Fajsp,
}

impl FormatTag {
    pub const ALL: [FormatTag; 4] = [
        FormatTag::Jsp,
        FormatTag::Fjsp,
        FormatTag::FjspSdst,
        FormatTag::Fajsp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormatTag::Jsp => "jsp",
            FormatTag::Fjsp => "fjsp",
            FormatTag::FjspSdst => "fjsp_sdst",
            FormatTag::Fajsp => "fajsp",
        }
    }
}

impl fmt::Display for FormatTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormatTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormatTag::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown format {s:?} (expected jsp, fjsp, fjsp_sdst or fajsp)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{loc}: {reason}")]
    Syntax { loc: Location, reason: String },
    #[error("{loc}: machine {machine} is out of range for {machine_count} machines")]
    MachineIndex {
        loc: Location,
        machine: usize,
        machine_count: usize,
    },
    #[error("{loc}: job line does not match its declared counts ({reason})")]
    AlternativeCountMismatch { loc: Location, reason: String },
    #[error("{loc}: setup matrix dimension error: {reason}")]
    Dimension { loc: Location, reason: String },
    #[error("{loc}: assembly arcs form a cycle through jobs {jobs:?}")]
    Cycle { loc: Location, jobs: Vec<usize> },
    #[error("{loc}: {source}")]
    Model { loc: Location, source: ModelError },
}

impl ParseError {
    pub fn location(&self) -> Location {
        match self {
            ParseError::Syntax { loc, .. }
            | ParseError::MachineIndex { loc, .. }
            | ParseError::AlternativeCountMismatch { loc, .. }
            | ParseError::Dimension { loc, .. }
            | ParseError::Cycle { loc, .. }
            | ParseError::Model { loc, .. } => *loc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerializeError {
    #[error("instance cannot be written as {format}: {reason}")]
    NotRepresentable { format: FormatTag, reason: String },
}

/// Parses `text` in the given format.
pub fn parse(format: FormatTag, text: &str) -> Result<Instance, ParseError> {
    match format {
        FormatTag::Jsp => parse_jsp(text),
        FormatTag::Fjsp => parse_fjsp(text),
        FormatTag::FjspSdst => parse_fjsp_sdst(text),
        FormatTag::Fajsp => parse_fajsp(text),
    }
}

/// Like [`parse`] but accepts raw bytes, reporting invalid UTF-8 as a syntax error.
pub fn parse_bytes(format: FormatTag, bytes: &[u8]) -> Result<Instance, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(format, text),
        Err(err) => {
            let valid = &bytes[..err.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            let column = String::from_utf8_lossy(&valid[line_start..]).chars().count() + 1;
            Err(ParseError::Syntax {
                loc: Location { line, column },
                reason: "invalid UTF-8".into(),
            })
        }
    }
}

/// Upper bound on job and machine counts accepted from a header.
pub const MAX_COUNT: usize = 1 << 20;

pub fn parse_jsp(text: &str) -> Result<Instance, ParseError> {
    let mut cursor = Cursor::new(text);
    let header = cursor.next_line("header `n m`")?;
    let (job_count, machine_count) = header_counts(&header, false)?;
    let mut jobs = Vec::new();
    for id in 0..job_count {
        let line = cursor.next_line(&format!("job line {}", id + 1))?;
        if line.tokens.len() % 2 != 0 || line.tokens.len() / 2 != machine_count {
            return Err(ParseError::Syntax {
                loc: line.loc(),
                reason: format!(
                    "expected {machine_count} machine/duration pairs, found {} tokens",
                    line.tokens.len()
                ),
            });
        }
        let mut ops = Vec::with_capacity(machine_count);
        for pair in line.tokens.chunks(2) {
            let machine: usize = pair[0].parse("a machine index")?;
            if machine >= machine_count {
                return Err(ParseError::MachineIndex {
                    loc: pair[0].loc,
                    machine,
                    machine_count,
                });
            }
            ops.push(Operation::new([(machine, pair[1].duration()?)]));
        }
        jobs.push(Job::new(id, ops));
    }
    cursor.expect_end()?;
    let loc = header.loc();
    Instance::new(Variant::Jsp, machine_count, jobs, None, None)
        .map_err(|source| ParseError::Model { loc, source })
}

pub fn parse_fjsp(text: &str) -> Result<Instance, ParseError> {
    let mut cursor = Cursor::new(text);
    let (header, machine_count, jobs) = fjsp_body(&mut cursor)?;
    cursor.expect_end()?;
    build(Variant::Fjsp, &header, machine_count, jobs, None, None)
}

pub fn parse_fjsp_sdst(text: &str) -> Result<Instance, ParseError> {
    let mut cursor = Cursor::new(text);
    let (header, machine_count, jobs) = fjsp_body(&mut cursor)?;
    let size: usize = jobs.iter().map(|j| j.operations.len()).sum();
    let eof = cursor.eof();
    let blocks = split_blocks(cursor.rest());

    let mut matrix_rows: Vec<Vec<Line>> = match blocks.len() {
        n if n == machine_count => blocks,
        1 => {
            let rows = blocks.into_iter().next().expect("one block");
            if rows.len() != machine_count.saturating_mul(size) {
                let loc = rows.last().map_or(eof, |l| l.loc());
                return Err(ParseError::Dimension {
                    loc,
                    reason: format!(
                        "expected {machine_count} matrices of {size} rows ({} rows), found {}",
                        machine_count.saturating_mul(size),
                        rows.len()
                    ),
                });
            }
            let mut rows = rows.into_iter();
            (0..machine_count)
                .map(|_| rows.by_ref().take(size).collect())
                .collect()
        }
        n => {
            return Err(ParseError::Dimension {
                loc: eof,
                reason: format!("expected {machine_count} setup matrices, found {n} blocks"),
            })
        }
    };

    let mut matrices = Vec::with_capacity(machine_count);
    for (machine, rows) in matrix_rows.drain(..).enumerate() {
        if rows.len() != size {
            let loc = rows.last().map_or(eof, |l| l.loc());
            return Err(ParseError::Dimension {
                loc,
                reason: format!(
                    "matrix for machine {machine} has {} rows, expected {size}",
                    rows.len()
                ),
            });
        }
        let mut matrix = Vec::with_capacity(size);
        for line in rows {
            if line.tokens.len() != size {
                return Err(ParseError::Dimension {
                    loc: line.loc(),
                    reason: format!(
                        "row has {} entries, expected {size}",
                        line.tokens.len()
                    ),
                });
            }
            let row = line
                .tokens
                .iter()
                .map(|t| t.bounded_time("a setup time"))
                .collect::<Result<Vec<_>, _>>()?;
            matrix.push(row);
        }
        matrices.push(matrix);
    }
    let setup = SetupTimes::from_matrices(matrices, size).map_err(|source| ParseError::Model {
        loc: header.loc(),
        source,
    })?;
    build(Variant::FjspSdst, &header, machine_count, jobs, Some(setup), None)
}

pub fn parse_fajsp(text: &str) -> Result<Instance, ParseError> {
    let mut cursor = Cursor::new(text);
    let (header, machine_count, jobs) = fjsp_body(&mut cursor)?;
    let marker = cursor.next_line("`assembly` section")?;
    if marker.tokens.len() != 1 || marker.tokens[0].text != "assembly" {
        return Err(ParseError::Syntax {
            loc: marker.loc(),
            reason: "expected a line containing only `assembly`".into(),
        });
    }
    let job_count = jobs.len();
    let mut arcs = Vec::new();
    for row in cursor.rest() {
        let Row::Content(line) = row else { continue };
        if line.tokens.len() != 2 {
            return Err(ParseError::Syntax {
                loc: line.loc(),
                reason: format!("arc lines need 2 job ids, found {} tokens", line.tokens.len()),
            });
        }
        let mut ids = [0usize; 2];
        for (slot, tok) in ids.iter_mut().zip(&line.tokens) {
            *slot = tok.parse("a job id")?;
            if *slot >= job_count {
                return Err(ParseError::Syntax {
                    loc: tok.loc,
                    reason: format!("job id {} is out of range for {job_count} jobs", *slot),
                });
            }
        }
        arcs.push(AssemblyArc {
            predecessor_job: ids[0],
            successor_job: ids[1],
        });
    }
    if let Some(jobs) = find_cycle(job_count, &arcs) {
        return Err(ParseError::Cycle {
            loc: marker.loc(),
            jobs,
        });
    }
    build(Variant::Fajsp, &header, machine_count, jobs, None, Some(arcs))
}

fn build(
    variant: Variant,
    header: &Line,
    machine_count: usize,
    jobs: Vec<Job>,
    setup: Option<SetupTimes>,
    assembly: Option<Vec<AssemblyArc>>,
) -> Result<Instance, ParseError> {
    Instance::new(variant, machine_count, jobs, setup, assembly).map_err(|source| ParseError::Model {
        loc: header.loc(),
        source,
    })
}

fn header_counts(header: &Line, allow_flexibility: bool) -> Result<(usize, usize), ParseError> {
    let max = if allow_flexibility { 3 } else { 2 };
    if header.tokens.len() < 2 || header.tokens.len() > max {
        return Err(ParseError::Syntax {
            loc: header.loc(),
            reason: if allow_flexibility {
                "header must be `n m [avg_flexibility]`".into()
            } else {
                "header must be `n m`".into()
            },
        });
    }
    let jobs: usize = header.tokens[0].parse("a job count")?;
    let machines: usize = header.tokens[1].parse("a machine count")?;
    if let Some(flex) = header.tokens.get(2) {
        let value: f64 = flex.parse("an average flexibility")?;
        if !value.is_finite() {
            return Err(ParseError::Syntax {
                loc: flex.loc,
                reason: "average flexibility must be finite".into(),
            });
        }
    }
    for (count, tok) in [(jobs, &header.tokens[0]), (machines, &header.tokens[1])] {
        if count == 0 || count > MAX_COUNT {
            return Err(ParseError::Syntax {
                loc: tok.loc,
                reason: format!("job and machine counts must be in 1..={MAX_COUNT}"),
            });
        }
    }
    Ok((jobs, machines))
}

fn fjsp_body<'a>(cursor: &mut Cursor<'a>) -> Result<(Line<'a>, usize, Vec<Job>), ParseError> {
    let header = cursor.next_line("header `n m [avg_flexibility]`")?;
    let (job_count, machine_count) = header_counts(&header, true)?;
    let mut jobs = Vec::new();
    for id in 0..job_count {
        let line = cursor.next_line(&format!("job line {}", id + 1))?;
        jobs.push(fjsp_job(id, &line, machine_count)?);
    }
    Ok((header, machine_count, jobs))
}

fn fjsp_job(id: usize, line: &Line, machine_count: usize) -> Result<Job, ParseError> {
    let tokens = &line.tokens;
    let op_count: usize = tokens[0].parse("an operation count")?;
    if op_count == 0 {
        return Err(ParseError::Syntax {
            loc: tokens[0].loc,
            reason: "a job needs at least one operation".into(),
        });
    }
    let mut pos = 1;
    let mut ops = Vec::new();
    for index in 0..op_count {
        let Some(count_tok) = tokens.get(pos) else {
            return Err(ParseError::AlternativeCountMismatch {
                loc: line.end_loc(),
                reason: format!("declared {op_count} operations, found {index}"),
            });
        };
        let count: usize = count_tok.parse("an alternative count")?;
        if count == 0 {
            return Err(ParseError::Syntax {
                loc: count_tok.loc,
                reason: "an operation needs at least one machine alternative".into(),
            });
        }
        pos += 1;
        let available = tokens.len() - pos;
        if available / 2 < count {
            return Err(ParseError::AlternativeCountMismatch {
                loc: count_tok.loc,
                reason: format!(
                    "operation {} declares {count} alternatives but only {available} tokens remain",
                    index + 1
                ),
            });
        }
        let mut alternatives = Vec::with_capacity(count);
        for pair in tokens[pos..pos + 2 * count].chunks(2) {
            let machine: usize = pair[0].parse("a machine number")?;
            if machine == 0 || machine > machine_count {
                return Err(ParseError::MachineIndex {
                    loc: pair[0].loc,
                    machine,
                    machine_count,
                });
            }
            if alternatives.iter().any(|&(m, _)| m == machine - 1) {
                return Err(ParseError::Syntax {
                    loc: pair[0].loc,
                    reason: format!("machine {machine} listed twice for one operation"),
                });
            }
            alternatives.push((machine - 1, pair[1].duration()?));
        }
        pos += 2 * count;
        ops.push(Operation::new(alternatives));
    }
    if pos != tokens.len() {
        return Err(ParseError::AlternativeCountMismatch {
            loc: tokens[pos].loc,
            reason: format!("{} unexpected tokens after the last operation", tokens.len() - pos),
        });
    }
    Ok(Job::new(id, ops))
}

fn split_blocks(rows: Vec<Row<'_>>) -> Vec<Vec<Line<'_>>> {
    let mut blocks = Vec::new();
    let mut current = Vec::new();
    for row in rows {
        match row {
            Row::Content(line) => current.push(line),
            Row::Blank => {
                if !current.is_empty() {
                    blocks.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    blocks
}

/// Writes the instance in canonical form for `format`.
///
/// Fails when the format would lose information: `jsp` needs one machine per
/// operation and exactly `m` operations per job, only `fjsp_sdst` carries
/// setup times, only `fajsp` carries assembly arcs, and no format stores job
/// ready times.
pub fn serialize(instance: &Instance, format: FormatTag) -> Result<String, SerializeError> {
    let fail = |reason: &str| SerializeError::NotRepresentable {
        format,
        reason: reason.to_string(),
    };
    if instance.jobs().iter().any(|j| j.ready_time != 0) {
        return Err(fail("job ready times are not stored in instance files"));
    }
    if instance.setup().is_some() && format != FormatTag::FjspSdst {
        return Err(fail("setup times need the fjsp_sdst format"));
    }
    if instance.assembly().is_some() && format != FormatTag::Fajsp {
        return Err(fail("assembly arcs need the fajsp format"));
    }
    let m = instance.machine_count();
    let mut out = String::new();
    match format {
        FormatTag::Jsp => {
            if !matches!(instance.variant(), Variant::Jsp | Variant::Fsp) {
                return Err(fail("only JSP and FSP instances use the jsp format"));
            }
            if instance.jobs().iter().any(|j| j.operations.len() != m) {
                return Err(fail("every job needs exactly one operation per machine slot"));
            }
            writeln!(out, "{} {}", instance.job_count(), m).unwrap();
            for job in instance.jobs() {
                let fields: Vec<String> = job
                    .operations
                    .iter()
                    .map(|op| {
                        let (machine, p) = op.alternatives()[0];
                        format!("{machine} {p}")
                    })
                    .collect();
                writeln!(out, "{}", fields.join(" ")).unwrap();
            }
        }
        FormatTag::Fjsp | FormatTag::FjspSdst | FormatTag::Fajsp => {
            match format {
                FormatTag::FjspSdst if instance.setup().is_none() => {
                    return Err(fail("instance has no setup times"))
                }
                FormatTag::Fajsp if instance.assembly().is_none() => {
                    return Err(fail("instance has no assembly section"))
                }
                _ => {}
            }
            write_fjsp_body(instance, &mut out);
            if let Some(setup) = instance.setup() {
                for machine in 0..m {
                    out.push('\n');
                    for from in 0..setup.size() {
                        let row: Vec<String> =
                            setup.row(machine, from).iter().map(|v| v.to_string()).collect();
                        writeln!(out, "{}", row.join(" ")).unwrap();
                    }
                }
            }
            if let Some(arcs) = instance.assembly() {
                out.push_str("assembly\n");
                for arc in arcs {
                    writeln!(out, "{} {}", arc.predecessor_job, arc.successor_job).unwrap();
                }
            }
        }
    }
    Ok(out)
}

fn write_fjsp_body(instance: &Instance, out: &mut String) {
    let alternatives: usize = instance.ops().map(|op| op.alternatives().len()).sum();
    let flexibility = alternatives as f64 / instance.total_ops() as f64;
    writeln!(
        out,
        "{} {} {}",
        instance.job_count(),
        instance.machine_count(),
        // shortest decimal that round-trips
        flexibility
    )
    .unwrap();
    for job in instance.jobs() {
        let mut fields = vec![job.operations.len().to_string()];
        for op in &job.operations {
            fields.push(op.alternatives().len().to_string());
            for &(machine, p) in op.alternatives() {
                fields.push((machine + 1).to_string());
                fields.push(p.to_string());
            }
        }
        writeln!(out, "{}", fields.join(" ")).unwrap();
    }
}
