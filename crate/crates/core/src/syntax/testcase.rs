use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::CheckError;

/// What an amplification step did to a test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModificationKind {
    LiteralAmp,
    CallDuplicated,
    CallRemoved,
    CallAdded,
    ObjectSynthesized,
    AssertionAdded,
    ExceptionWrapped,
}

impl fmt::Display for ModificationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One entry of an amplified test's modification ledger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modification {
    pub kind: ModificationKind,
    /// Node the operator was applied to, numbered as in the test it was
    /// applied to.
    pub target: NodeId,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Origin {
    Manual,
    /// `parent` names the hand-written test this one descends from; the
    /// ledger is cumulative across generations.
    Amplified { parent: String, ledger: Vec<Modification> },
}

/// A test function plus its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct TestMethod {
    pub decl: MethodDecl,
    pub origin: Origin,
}

impl TestMethod {
    pub fn manual(decl: MethodDecl) -> Self {
        Self { decl, origin: Origin::Manual }
    }

    pub fn name(&self) -> &str {
        &self.decl.name
    }

    pub fn body(&self) -> &[Stmt] {
        &self.decl.body
    }

    pub fn assertions(&self) -> impl Iterator<Item = &Stmt> {
        self.decl.body.iter().filter(|s| s.is_assertion())
    }

    pub fn ledger(&self) -> &[Modification] {
        match &self.origin {
            Origin::Manual => &[],
            Origin::Amplified { ledger, .. } => ledger,
        }
    }

    /// Name of the hand-written ancestor (itself when manual).
    pub fn root_name(&self) -> &str {
        match &self.origin {
            Origin::Manual => &self.decl.name,
            Origin::Amplified { parent, .. } => parent,
        }
    }
}

/// Extracts the test functions of a test file. Test files hold nothing but
/// `test_*` functions.
pub fn tests_in(module: &Module) -> Result<Vec<TestMethod>, CheckError> {
    if let Some(class) = module.classes.first() {
        return Err(CheckError::new(&class.meta.pos, "test files cannot declare classes"));
    }
    module
        .functions
        .iter()
        .map(|f| {
            if f.name.starts_with("test_") {
                Ok(TestMethod::manual(f.clone()))
            } else {
                Err(CheckError::new(&f.meta.pos, format!("`{}` in a test file is not a `test_` function", f.name)))
            }
        })
        .collect()
}
