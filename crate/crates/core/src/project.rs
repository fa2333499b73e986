//! On-disk layout: `src/*.mini` holds application code, `tests/*.mini` the
//! hand-written tests.

use std::fs;
use std::path::{Path, PathBuf};

use crate::program::Program;
use crate::syntax::{parse_module, tests_in, CheckError, Module, ParseError, TestMethod};

#[derive(Debug, thiserror::Error)]
pub enum ProjectError {
    #[error("cannot access {}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("invalid tests pattern `{0}`")]
    Pattern(String),
    #[error("no test file matches `{0}`")]
    NoTests(String),
}

/// A parsed test file with its tests.
#[derive(Clone, Debug)]
pub struct TestFile {
    /// Path relative to the project root, with `/` separators.
    pub path: String,
    pub source: String,
    pub tests: Vec<TestMethod>,
}

#[derive(Clone, Debug)]
pub struct Project {
    pub root: PathBuf,
    pub program: Program,
    pub test_files: Vec<TestFile>,
}

impl Project {
    /// Loads and checks a project. `tests` filters test files by a glob
    /// matched against either the relative path or the file name.
    pub fn load(root: &Path, tests: Option<&str>) -> Result<Self, ProjectError> {
        let pattern = tests
            .map(|p| glob::Pattern::new(p).map_err(|_| ProjectError::Pattern(p.to_string())))
            .transpose()?;
        let mut modules = Vec::new();
        for (rel, source) in read_dir(root, "src")? {
            modules.push(parse_module(&source, &rel)?);
        }
        let program = Program::new(Module::merge(modules))?;
        let mut test_files = Vec::new();
        for (rel, source) in read_dir(root, "tests")? {
            if let Some(pattern) = &pattern {
                let name = rel.rsplit('/').next().unwrap_or(&rel);
                if !pattern.matches(&rel) && !pattern.matches(name) {
                    continue;
                }
            }
            let module = parse_module(&source, &rel)?;
            let tests = tests_in(&module)?;
            for t in &tests {
                program.check_test(&t.decl)?;
            }
            test_files.push(TestFile { path: rel, source, tests });
        }
        if let (Some(p), true) = (tests, test_files.is_empty()) {
            return Err(ProjectError::NoTests(p.to_string()));
        }
        Ok(Self { root: root.to_path_buf(), program, test_files })
    }

    pub fn tests(&self) -> impl Iterator<Item = &TestMethod> {
        self.test_files.iter().flat_map(|f| &f.tests)
    }

    /// The file a manual test lives in.
    pub fn file_of(&self, test: &str) -> Option<&TestFile> {
        self.test_files.iter().find(|f| f.tests.iter().any(|t| t.name() == test))
    }
}

/// `.mini` files of `root/dir`, sorted by name.
fn read_dir(root: &Path, dir: &str) -> Result<Vec<(String, String)>, ProjectError> {
    let path = root.join(dir);
    fn io(path: &Path) -> impl Fn(std::io::Error) -> ProjectError + '_ {
        move |source| ProjectError::Io { path: path.to_path_buf(), source }
    }
    let mut names: Vec<String> = fs::read_dir(&path)
        .map_err(io(&path))?
        .filter_map(|entry| entry.ok())
        .map(|entry| entry.file_name().to_string_lossy().into_owned())
        .filter(|name| name.ends_with(".mini"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|name| {
            let file = path.join(&name);
            let source = fs::read_to_string(&file).map_err(io(&file))?;
            Ok((format!("{dir}/{name}"), source))
        })
        .collect()
}
