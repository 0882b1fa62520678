use std::path::{Path, PathBuf};
use std::process::Command;

use super::{AlgorithmDescriptor, AlgorithmKind, Context, Deletion, HidingAlgorithm, Outcome};
use crate::dataset::{write_database, write_itemset_file};
use crate::error::{Error, Result};

/// An algorithm run as a subprocess:
/// `program <database> <sensitive> <sigma-min> <plan-out>`. The program writes
/// one `tid item` deletion per line to `<plan-out>` and exits with status 0.
pub struct ExternalAlgorithm {
    descriptor: AlgorithmDescriptor,
    program: PathBuf,
}

impl ExternalAlgorithm {
    /// The algorithm id is the file stem of `program`.
    pub fn new(program: impl AsRef<Path>) -> Result<Self> {
        let program = program.as_ref();
        if !program.is_file() {
            return Err(Error::InvalidArgument(format!(
                "external algorithm {} is not a file",
                program.display()
            )));
        }
        let id = program
            .file_stem()
            .and_then(|s| s.to_str())
            .filter(|s| !s.is_empty())
            .ok_or_else(|| {
                Error::InvalidArgument(format!("cannot derive an id from {}", program.display()))
            })?;
        let program = program.canonicalize().map_err(|e| Error::io(program, e))?;
        Ok(ExternalAlgorithm {
            descriptor: AlgorithmDescriptor::new(id, AlgorithmKind::External)
                .with_param("program", program.display().to_string()),
            program,
        })
    }

    fn fail(&self, message: String) -> Error {
        Error::ExternalAlgorithm {
            id: self.descriptor.id.clone(),
            message,
        }
    }
}

fn tail(bytes: &[u8], lines: usize) -> String {
    let text = String::from_utf8_lossy(bytes);
    let all: Vec<&str> = text.lines().collect();
    all[all.len().saturating_sub(lines)..].join("\n")
}

/// Parses `tid item` lines; blank lines are ignored.
pub(crate) fn parse_plan(text: &str) -> std::result::Result<Vec<Deletion>, String> {
    let mut plan = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => {}
            [t, i] => match (t.parse(), i.parse()) {
                (Ok(t), Ok(i)) => plan.push((t, i)),
                _ => return Err(format!("plan line {}: expected two integers, got {line:?}", k + 1)),
            },
            _ => return Err(format!("plan line {}: expected \"tid item\", got {line:?}", k + 1)),
        }
    }
    Ok(plan)
}

impl HidingAlgorithm for ExternalAlgorithm {
    fn descriptor(&self) -> &AlgorithmDescriptor {
        &self.descriptor
    }

    fn run(&self, ctx: &Context<'_>) -> Result<Outcome> {
        let dir = tempfile::tempdir().map_err(|e| Error::io(std::env::temp_dir(), e))?;
        let db_path = dir.path().join("database.dat");
        let sensitive_path = dir.path().join("sensitive.dat");
        let plan_path = dir.path().join("plan.txt");
        write_database(ctx.db, &db_path)?;
        write_itemset_file(ctx.sensitive.itemsets(), &sensitive_path)?;
        let output = Command::new(&self.program)
            .arg(&db_path)
            .arg(&sensitive_path)
            .arg(ctx.sigma_min.to_string())
            .arg(&plan_path)
            .output()
            .map_err(|e| self.fail(format!("failed to start {}: {e}", self.program.display())))?;
        if !output.status.success() {
            return Err(self.fail(format!("{}; stderr: {}", output.status, tail(&output.stderr, 20))));
        }
        let text = std::fs::read_to_string(&plan_path)
            .map_err(|e| self.fail(format!("no readable plan file: {e}")))?;
        let deletions = parse_plan(&text).map_err(|m| self.fail(m))?;
        let mut notes = Vec::new();
        if !output.stderr.is_empty() {
            notes.push(format!("plugin stderr: {}", tail(&output.stderr, 5)));
        }
        Ok(Outcome { deletions, notes })
    }
}
