use std::collections::HashMap;
use std::sync::Arc;

use crate::syntax::{check_program, check_test, CheckError, ClassDecl, MethodDecl, Module, TypeTable};

/// Statically checked application code, indexed for execution.
#[derive(Clone, Debug)]
pub struct Program {
    module: Arc<Module>,
    types: Arc<TypeTable>,
    classes: Arc<HashMap<String, usize>>,
    functions: Arc<HashMap<String, usize>>,
}

impl Program {
    pub fn new(module: Module) -> Result<Self, CheckError> {
        let types = check_program(&module)?;
        Ok(Self::with_types(module, types))
    }

    /// Builds a program from an already checked module. Used for mutants,
    /// whose rewrites are type-preserving.
    pub(crate) fn with_types(module: Module, types: TypeTable) -> Self {
        let classes = module.classes.iter().enumerate().map(|(i, c)| (c.name.clone(), i)).collect();
        let functions = module.functions.iter().enumerate().map(|(i, f)| (f.name.clone(), i)).collect();
        Self {
            module: Arc::new(module),
            types: Arc::new(types),
            classes: Arc::new(classes),
            functions: Arc::new(functions),
        }
    }

    pub fn module(&self) -> &Module {
        &self.module
    }

    pub fn types(&self) -> &TypeTable {
        &self.types
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.get(name).map(|&i| &self.module.classes[i])
    }

    pub fn function(&self, name: &str) -> Option<&MethodDecl> {
        self.functions.get(name).map(|&i| &self.module.functions[i])
    }

    /// Statically checks a test against this program.
    pub fn check_test(&self, test: &MethodDecl) -> Result<TypeTable, CheckError> {
        check_test(&self.module, test)
    }

    /// Returns a program sharing this one's type table but running `module`.
    pub(crate) fn replaced(&self, module: Module) -> Self {
        Self {
            module: Arc::new(module),
            types: self.types.clone(),
            classes: self.classes.clone(),
            functions: self.functions.clone(),
        }
    }
}
