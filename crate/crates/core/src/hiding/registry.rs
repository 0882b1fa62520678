use std::path::{Path, PathBuf};

use log::{info, warn};

use super::{
    hide, AlgorithmDescriptor, ExternalAlgorithm, HidingAlgorithm, HidingOptions, HidingResult,
    HidingTask, Inline, MaxAccuracy, MaxMin, Wba,
};
use crate::error::{Error, Result};

/// Algorithms by id, in registration order.
pub struct Registry {
    algorithms: Vec<Box<dyn HidingAlgorithm>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            algorithms: Vec::new(),
        }
    }

    /// The built-in library.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        let builtins: [Box<dyn HidingAlgorithm>; 7] = [
            Box::new(MaxMin::first()),
            Box::new(MaxMin::second()),
            Box::new(Wba::new()),
            Box::new(MaxAccuracy::plain()),
            Box::new(MaxAccuracy::coefficient_based()),
            Box::new(MaxAccuracy::heuristic_coefficients()),
            Box::new(Inline::new()),
        ];
        for a in builtins {
            r.register(a).expect("built-in ids are distinct");
        }
        r
    }

    pub fn register(&mut self, algorithm: Box<dyn HidingAlgorithm>) -> Result<AlgorithmDescriptor> {
        let desc = algorithm.descriptor().clone();
        if self.algorithms.iter().any(|a| a.descriptor().id == desc.id) {
            return Err(Error::DuplicateAlgorithm(desc.id));
        }
        self.algorithms.push(algorithm);
        Ok(desc)
    }

    pub fn register_external(&mut self, program: impl AsRef<Path>) -> Result<AlgorithmDescriptor> {
        self.register(Box::new(ExternalAlgorithm::new(program)?))
    }

    /// Registers every executable file in `dir`, in file-name order. A
    /// missing directory registers nothing.
    pub fn scan_extensions(&mut self, dir: impl AsRef<Path>) -> Vec<(PathBuf, Result<AlgorithmDescriptor>)> {
        let dir = dir.as_ref();
        let Ok(entries) = std::fs::read_dir(dir) else {
            return Vec::new();
        };
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && is_executable(p))
            .collect();
        paths.sort();
        paths
            .into_iter()
            .map(|p| {
                let r = self.register_external(&p);
                match &r {
                    Ok(d) => info!("registered external algorithm {} from {}", d.id, p.display()),
                    Err(e) => warn!("skipping {}: {e}", p.display()),
                }
                (p, r)
            })
            .collect()
    }

    pub fn get(&self, id: &str) -> Result<&dyn HidingAlgorithm> {
        self.algorithms
            .iter()
            .find(|a| a.descriptor().id == id)
            .map(|a| a.as_ref())
            .ok_or_else(|| Error::UnknownAlgorithm(id.to_owned()))
    }

    pub fn ids(&self) -> Vec<&str> {
        self.algorithms.iter().map(|a| a.descriptor().id.as_str()).collect()
    }

    pub fn descriptors(&self) -> impl Iterator<Item = &AlgorithmDescriptor> {
        self.algorithms.iter().map(|a| a.descriptor())
    }

    /// Expands `"all"` or a comma-separated id list, checking every id.
    pub fn resolve(&self, spec: &str) -> Result<Vec<String>> {
        if spec.trim() == "all" {
            return Ok(self.ids().into_iter().map(str::to_owned).collect());
        }
        let mut ids: Vec<String> = Vec::new();
        for id in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            self.get(id)?;
            if !ids.iter().any(|x| x == id) {
                ids.push(id.to_owned());
            }
        }
        Ok(ids)
    }

    pub fn hide(&self, id: &str, task: &HidingTask<'_>, options: &HidingOptions) -> Result<HidingResult> {
        hide(self.get(id)?, task, options)
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(unix)]
fn is_executable(p: &Path) -> bool {
    use std::os::unix::fs::PermissionsExt;
    p.metadata().is_ok_and(|m| m.permissions().mode() & 0o111 != 0)
}

#[cfg(not(unix))]
fn is_executable(_: &Path) -> bool {
    true
}

/// The `Extensions` directory next to the running executable.
pub fn default_extensions_dir() -> Option<PathBuf> {
    std::env::current_exe().ok()?.parent().map(|d| d.join("Extensions"))
}
