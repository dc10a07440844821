//! Structural syntax tree produced by the island parser.

use serde::{Deserialize, Serialize};

use crate::diag::Diagnostic;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineSpan {
    pub start: u32,
    pub end: u32,
}

impl LineSpan {
    pub fn contains(&self, other: &LineSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &LineSpan) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// Half-open byte range into the unit's source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ByteSpan {
    pub start: usize,
    pub end: usize,
}

impl ByteSpan {
    pub fn contains(&self, other: &ByteSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LocStats {
    pub physical_lines: u32,
    pub blank_lines: u32,
    pub comment_lines: u32,
    pub code_lines: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntaxUnit {
    pub path: String,
    pub usings: Vec<String>,
    pub declarations: Vec<TypeDecl>,
    pub diagnostics: Vec<Diagnostic>,
    pub loc: LocStats,
}

impl SyntaxUnit {
    /// All type declarations, depth first, outer before nested.
    pub fn all_types(&self) -> Vec<&TypeDecl> {
        fn walk<'a>(decls: &'a [TypeDecl], out: &mut Vec<&'a TypeDecl>) {
            for d in decls {
                out.push(d);
                walk(&d.nested, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.declarations, &mut out);
        out
    }

    pub fn has_fatal_diagnostics(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_fatal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Class,
    Struct,
    Interface,
    Enum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeUse {
    /// Simple name without namespace qualifier or `Attribute` suffix.
    pub name: String,
    pub arguments: Option<String>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDecl {
    pub kind: TypeKind,
    pub name: String,
    pub namespace: Option<String>,
    pub modifiers: Vec<String>,
    pub attributes: Vec<AttributeUse>,
    pub base_types: Vec<String>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub nested: Vec<TypeDecl>,
    pub span: LineSpan,
    pub bytes: ByteSpan,
}

impl TypeDecl {
    pub fn has_attribute(&self, names: &[String]) -> bool {
        self.attributes.iter().any(|a| names.iter().any(|n| n == &a.name))
    }

    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn is_abstract(&self) -> bool {
        self.modifiers.iter().any(|m| m == "abstract")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FieldDecl {
    pub name: String,
    pub type_name: String,
    pub is_property: bool,
    pub modifiers: Vec<String>,
    pub attributes: Vec<AttributeUse>,
    pub initializer: Option<String>,
    pub line: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    Method,
    Constructor,
    Destructor,
    Operator,
    Conversion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Parameter {
    pub name: String,
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodDecl {
    pub name: String,
    pub kind: MethodKind,
    pub modifiers: Vec<String>,
    pub attributes: Vec<AttributeUse>,
    pub return_type: Option<String>,
    /// Target type of a user-defined conversion operator.
    pub conversion_target: Option<String>,
    pub parameters: Vec<Parameter>,
    pub parameters_text: String,
    pub has_body: bool,
    pub statements: Vec<Statement>,
    /// Code lines from signature through closing brace; 0 without a body.
    pub body_loc: u32,
    pub span: LineSpan,
    pub bytes: ByteSpan,
}

impl MethodDecl {
    pub fn parameter_count(&self) -> usize {
        self.parameters.len()
    }

    pub fn has_attribute(&self, names: &[String]) -> bool {
        self.attributes.iter().any(|a| names.iter().any(|n| n == &a.name))
    }

    pub fn invocations(&self) -> impl Iterator<Item = &InvocationExpr> {
        self.statements.iter().flat_map(|s| s.invocations.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatementKind {
    Invocation,
    Assignment,
    LocalDeclaration,
    Yield,
    Return,
    Control,
    Opaque,
}

/// One statement of a method body. Bodies are flattened in source order;
/// statements nested in blocks of control statements follow their header
/// with a larger `depth`. A control statement only covers its header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Statement {
    pub kind: StatementKind,
    pub depth: u32,
    pub line: u32,
    pub span: ByteSpan,
    pub raw_text: String,
    pub invocations: Vec<InvocationExpr>,
    pub creations: Vec<ObjectCreation>,
    pub locals: Vec<LocalVar>,
    pub assignments: Vec<Assignment>,
    pub identifiers: Vec<IdentRef>,
    pub string_literals: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArgumentKind {
    StringLiteral,
    InterpolatedString,
    Lambda,
    NumberLiteral,
    Other,
}

impl ArgumentKind {
    pub fn is_string(self) -> bool {
        matches!(self, ArgumentKind::StringLiteral | ArgumentKind::InterpolatedString)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InvocationExpr {
    /// e.g. `["Assert", "AreEqual"]`; the last segment is the member name.
    pub receiver_chain: Vec<String>,
    pub generic: bool,
    pub argument_count: usize,
    pub argument_kinds: Vec<ArgumentKind>,
    pub arguments: Vec<String>,
    /// Member names invoked anywhere inside the argument list.
    pub calls_in_arguments: Vec<String>,
    pub raw_text: String,
    pub line: u32,
    pub span: ByteSpan,
}

impl InvocationExpr {
    pub fn member(&self) -> &str {
        self.receiver_chain.last().map(String::as_str).unwrap_or("")
    }

    pub fn head(&self) -> &str {
        self.receiver_chain.first().map(String::as_str).unwrap_or("")
    }

    /// `Head.Member` for two-segment chains, else the dotted chain.
    pub fn api_name(&self) -> String {
        self.receiver_chain.join(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ObjectCreation {
    /// Simple type name without namespace or generic arguments.
    pub type_name: String,
    pub type_text: String,
    pub argument_count: usize,
    pub arguments_text: String,
    pub line: u32,
    pub span: ByteSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LocalVar {
    pub name: String,
    /// `var` when implicitly typed.
    pub type_name: String,
    pub initializer: Option<String>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Assignment {
    /// Member-access chain assigned to, e.g. `this.obj` or `a.b`.
    pub target: String,
    pub operator: String,
    pub value: String,
    pub line: u32,
}

impl Assignment {
    /// Field name when the target is `f` or `this.f`.
    pub fn simple_target(&self) -> Option<&str> {
        let t = self.target.strip_prefix("this.").unwrap_or(&self.target);
        (!t.is_empty() && !t.contains(['.', '[', '('])).then_some(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IdentRef {
    pub name: String,
    /// Preceded by a member-access operator other than `this.`.
    pub qualified: bool,
    pub offset: usize,
}
