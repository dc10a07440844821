//! Island parser: declarations, attributes, fields and method bodies are
//! modeled precisely, anything else is skipped by balanced-bracket recovery.

use super::lexer::{tokenize, Lexed, Token, TokenKind};
use super::loc::LineFlags;
use super::syntax::*;
use crate::diag::Diagnostic;

pub(super) const TYPE_KEYWORDS: &[&str] = &[
    "bool", "byte", "char", "decimal", "double", "float", "int", "long", "object", "sbyte",
    "short", "string", "uint", "ulong", "ushort", "void",
];

const MODIFIERS: &[&str] = &[
    "abstract", "async", "const", "extern", "file", "fixed", "internal", "new", "override",
    "partial", "private", "protected", "public", "readonly", "required", "sealed", "static",
    "unsafe", "virtual", "volatile",
];

/// Tokens that can only start a member declaration, never a statement.
pub(super) const MEMBER_ONLY: &[&str] = &[
    "public", "private", "protected", "internal", "namespace", "class", "struct", "interface",
    "enum",
];

/// Tokenize and parse raw bytes. Undecodable input yields an empty unit
/// carrying an error diagnostic.
pub fn parse_source(source: &[u8], path: &str) -> SyntaxUnit {
    match tokenize(source) {
        Ok(lexed) => {
            let text = std::str::from_utf8(source).expect("validated by tokenize");
            parse_unit(&lexed, text, path)
        }
        Err(e) => SyntaxUnit {
            path: path.to_string(),
            usings: Vec::new(),
            declarations: Vec::new(),
            diagnostics: vec![Diagnostic::error(format!("unit skipped: {e}")).in_file(path)],
            loc: LocStats::default(),
        },
    }
}

pub fn parse_str(source: &str, path: &str) -> SyntaxUnit {
    let lexed = super::lexer::tokenize_str(source);
    parse_unit(&lexed, source, path)
}

/// Build the syntax tree for one lexed file. `source` must be the text the
/// tokens were produced from.
pub fn parse_unit(lexed: &Lexed<'_>, source: &str, path: &str) -> SyntaxUnit {
    let flags = LineFlags::from_tokens(&lexed.tokens, source);
    let toks: Vec<Token<'_>> = lexed
        .tokens
        .iter()
        .copied()
        .filter(|t| !t.kind.is_trivia())
        .collect();
    let matches = match_brackets(&toks);
    let mut p = Parser {
        src: source,
        toks,
        matches,
        pos: 0,
        flags,
        diags: lexed.diagnostics.clone(),
        usings: Vec::new(),
    };
    let mut declarations = Vec::new();
    let end = p.toks.len();
    p.parse_top(end, None, &mut declarations);
    let loc = p.flags.stats();
    let diagnostics = p
        .diags
        .into_iter()
        .map(|d| d.in_file(path))
        .collect();
    SyntaxUnit {
        path: path.to_string(),
        usings: p.usings,
        declarations,
        diagnostics,
        loc,
    }
}

/// Pair up `()`, `[]` and `{}`. A closer that does not match the innermost
/// opener closes the nearest matching opener, but parentheses and square
/// brackets never close across a brace.
fn match_brackets(toks: &[Token<'_>]) -> Vec<Option<usize>> {
    let mut out = vec![None; toks.len()];
    let mut stack: Vec<(usize, &str)> = Vec::new();
    for (i, t) in toks.iter().enumerate() {
        let opener = match t.text {
            "(" | "[" | "{" => {
                stack.push((i, t.text));
                continue;
            }
            ")" => "(",
            "]" => "[",
            "}" => "{",
            _ => continue,
        };
        let found = stack
            .iter()
            .rev()
            .take_while(|(_, o)| opener == "{" || *o != "{")
            .position(|(_, o)| *o == opener);
        if let Some(depth) = found {
            let at = stack.len() - 1 - depth;
            let (open, _) = stack[at];
            stack.truncate(at);
            out[open] = Some(i);
            out[i] = Some(open);
        }
    }
    out
}

pub(super) struct Parser<'s> {
    pub(super) src: &'s str,
    pub(super) toks: Vec<Token<'s>>,
    pub(super) matches: Vec<Option<usize>>,
    pub(super) pos: usize,
    pub(super) flags: LineFlags,
    pub(super) diags: Vec<Diagnostic>,
    usings: Vec<String>,
}

impl<'s> Parser<'s> {
    pub(super) fn text(&self, i: usize) -> &'s str {
        self.toks.get(i).map(|t| t.text).unwrap_or("")
    }

    pub(super) fn kind(&self, i: usize) -> Option<TokenKind> {
        self.toks.get(i).map(|t| t.kind)
    }

    pub(super) fn is_ident(&self, i: usize) -> bool {
        self.kind(i) == Some(TokenKind::Identifier)
    }

    pub(super) fn line(&self, i: usize) -> u32 {
        self.toks
            .get(i)
            .or_else(|| self.toks.last())
            .map(|t| t.line)
            .unwrap_or(1)
    }

    pub(super) fn end_line(&self, i: usize) -> u32 {
        self.toks
            .get(i)
            .or_else(|| self.toks.last())
            .map(|t| t.end_line())
            .unwrap_or(1)
    }

    /// Matching bracket index, if any.
    pub(super) fn matching(&self, i: usize) -> Option<usize> {
        self.matches.get(i).copied().flatten()
    }

    /// Index just past the group opened at `i`, or `i + 1` if unmatched.
    pub(super) fn skip_group(&self, i: usize) -> usize {
        self.matching(i).map_or(i + 1, |m| m + 1)
    }

    /// Source text covering tokens `a..b` (exclusive), empty when `a >= b`.
    pub(super) fn slice(&self, a: usize, b: usize) -> &'s str {
        if a >= b || a >= self.toks.len() {
            return "";
        }
        let b = b.min(self.toks.len());
        &self.src[self.toks[a].offset..self.toks[b - 1].end()]
    }

    pub(super) fn byte_span(&self, a: usize, b: usize) -> ByteSpan {
        if a >= b || a >= self.toks.len() {
            let at = self.toks.get(a).map_or(self.src.len(), |t| t.offset);
            return ByteSpan { start: at, end: at };
        }
        let b = b.min(self.toks.len());
        ByteSpan {
            start: self.toks[a].offset,
            end: self.toks[b - 1].end(),
        }
    }

    pub(super) fn is_type_keyword(&self, i: usize) -> bool {
        self.kind(i) == Some(TokenKind::Keyword) && TYPE_KEYWORDS.contains(&self.text(i))
    }

    /// If `<` at `i` opens a generic argument or parameter list, the index
    /// of its closing `>`.
    pub(super) fn generic_end(&self, i: usize) -> Option<usize> {
        if self.text(i) != "<" {
            return None;
        }
        let mut depth = 0usize;
        let mut j = i;
        while j < self.toks.len() && j < i + 128 {
            let t = &self.toks[j];
            match t.text {
                "<" => depth += 1,
                ">" => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(j);
                    }
                }
                "," | "." | "?" | "::" | "*" | "[" | "]" | "(" | ")" => {}
                _ if t.kind == TokenKind::Identifier => {}
                _ if t.kind == TokenKind::Keyword
                    && (TYPE_KEYWORDS.contains(&t.text) || matches!(t.text, "in" | "out")) => {}
                _ => return None,
            }
            j += 1;
        }
        None
    }

    /// Generic close usable in expression context: followed by a token that
    /// cannot continue a relational expression.
    pub(super) fn generic_end_in_expr(&self, i: usize) -> Option<usize> {
        let end = self.generic_end(i)?;
        let follow_ok = match self.toks.get(end + 1) {
            None => true,
            Some(t) => {
                matches!(
                    t.text,
                    "(" | ")" | "]" | "}" | "," | ";" | "." | "?." | ">" | "[" | "{" | "?" | ":" | "=>"
                ) || t.kind == TokenKind::Identifier
            }
        };
        follow_ok.then_some(end)
    }

    /// Index of the `<` matching a generic `>` at `close`, scanning back.
    pub(super) fn generic_start(&self, close: usize) -> Option<usize> {
        let mut depth = 0usize;
        let mut j = close;
        loop {
            let t = self.toks.get(j)?;
            match t.text {
                ">" => depth += 1,
                "<" => {
                    depth -= 1;
                    if depth == 0 {
                        return (self.generic_end(j) == Some(close)).then_some(j);
                    }
                }
                "," | "." | "?" | "::" | "*" | "[" | "]" | "(" | ")" => {}
                _ if t.kind == TokenKind::Identifier => {}
                _ if t.kind == TokenKind::Keyword && TYPE_KEYWORDS.contains(&t.text) => {}
                _ => return None,
            }
            if j == 0 || close - j > 128 {
                return None;
            }
            j -= 1;
        }
    }

    fn skip_modifiers(&mut self) -> Vec<String> {
        let mut mods = Vec::new();
        while self.pos < self.toks.len() {
            let t = self.toks[self.pos];
            let is_mod = MODIFIERS.contains(&t.text)
                && (t.kind == TokenKind::Keyword
                    || matches!(t.text, "async" | "partial" | "required" | "file"));
            // contextual modifiers must be followed by something declaration-like
            if !is_mod {
                break;
            }
            if t.kind == TokenKind::Identifier {
                let next = self.toks.get(self.pos + 1);
                let follows_decl = next.is_some_and(|n| {
                    n.kind == TokenKind::Identifier
                        || (n.kind == TokenKind::Keyword && n.text != "operator")
                });
                if !follows_decl {
                    break;
                }
            }
            mods.push(t.text.to_string());
            self.pos += 1;
        }
        mods
    }

    fn type_keyword_at(&self, i: usize) -> Option<TypeKind> {
        match self.text(i) {
            "class" if self.kind(i) == Some(TokenKind::Keyword) => Some(TypeKind::Class),
            "struct" => Some(TypeKind::Struct),
            "interface" => Some(TypeKind::Interface),
            "enum" => Some(TypeKind::Enum),
            "record"
                if self.is_ident(i)
                    && (self.is_ident(i + 1) || matches!(self.text(i + 1), "class" | "struct")) =>
            {
                Some(if self.text(i + 1) == "struct" {
                    TypeKind::Struct
                } else {
                    TypeKind::Class
                })
            }
            _ => None,
        }
    }

    /// Skip an unrecognized construct: up to and including the next `;`, or
    /// a balanced `{}` group, whichever comes first at depth zero.
    fn skip_junk(&mut self, end: usize) {
        let start = self.pos;
        while self.pos < end {
            match self.text(self.pos) {
                ";" => {
                    self.pos += 1;
                    break;
                }
                "{" => {
                    self.pos = self.skip_group(self.pos).min(end);
                    if self.text(self.pos) == ";" {
                        self.pos += 1;
                    }
                    break;
                }
                "(" | "[" => self.pos = self.skip_group(self.pos),
                "}" => {
                    if self.pos == start {
                        self.pos += 1;
                    }
                    break;
                }
                _ => self.pos += 1,
            }
        }
        self.pos = self.pos.min(end.max(start + 1));
    }

    fn parse_top(&mut self, end: usize, ns: Option<String>, out: &mut Vec<TypeDecl>) {
        let mut ns = ns;
        while self.pos < end {
            let i = self.pos;
            match self.text(i) {
                ";" => {
                    self.pos += 1;
                    continue;
                }
                "}" => {
                    self.diags
                        .push(Diagnostic::warning("unmatched closing brace").at_line(self.line(i)));
                    self.pos += 1;
                    continue;
                }
                "using" if self.text(i + 1) != "(" => {
                    let stop = (i..end).find(|&j| self.text(j) == ";").unwrap_or(end);
                    let mut a = i + 1;
                    if matches!(self.text(a), "static" | "global") {
                        a += 1;
                    }
                    let text = self.slice(a, stop).to_string();
                    if !text.is_empty() {
                        self.usings.push(text);
                    }
                    self.pos = (stop + 1).min(end.max(stop));
                    continue;
                }
                "global" if self.text(i + 1) == "using" => {
                    self.pos += 1;
                    continue;
                }
                "extern" if self.text(i + 1) == "alias" => {
                    self.skip_junk(end);
                    continue;
                }
                "namespace" => {
                    let mut j = i + 1;
                    while j < end && !matches!(self.text(j), "{" | ";") {
                        j += 1;
                    }
                    let name = self.slice(i + 1, j).replace(char::is_whitespace, "");
                    let qualified = match &ns {
                        Some(outer) => format!("{outer}.{name}"),
                        None => name,
                    };
                    if self.text(j) == "{" {
                        let close = self.matching(j);
                        let inner_end = close.unwrap_or(end);
                        if close.is_none() {
                            self.diags.push(
                                Diagnostic::error("unbalanced braces: namespace is not closed")
                                    .at_line(self.line(j)),
                            );
                        }
                        self.pos = j + 1;
                        self.parse_top(inner_end, Some(qualified), out);
                        self.pos = (inner_end + 1).min(end);
                    } else {
                        ns = Some(qualified);
                        self.pos = j + 1;
                    }
                    continue;
                }
                _ => {}
            }
            let attrs = self.parse_attributes(end);
            let start = self.pos;
            let mods = self.skip_modifiers();
            if self.pos >= end {
                break;
            }
            if self.type_keyword_at(self.pos).is_some() {
                if let Some(decl) = self.parse_type(attrs, mods, start, ns.clone(), end) {
                    out.push(decl);
                }
            } else if self.pos > i && attrs.is_empty() && mods.is_empty() {
                // only attributes were consumed (assembly-level)
            } else if self.pos == start && !attrs.is_empty() && mods.is_empty() {
                // attribute section with nothing declarable after it
            } else {
                if self.text(self.pos) != "delegate" {
                    self.diags.push(
                        Diagnostic::warning("unrecognized top-level construct skipped")
                            .at_line(self.line(self.pos)),
                    );
                }
                self.skip_junk(end);
            }
            if self.pos == i {
                self.pos += 1;
            }
        }
    }

    /// Consume consecutive attribute sections at the cursor.
    pub(super) fn parse_attributes(&mut self, end: usize) -> Vec<AttributeUse> {
        let mut attrs = Vec::new();
        while self.pos < end
            && self.kind(self.pos) == Some(TokenKind::AttributeBracket)
            && self.text(self.pos) == "["
        {
            let open = self.pos;
            let close = self.matching(open).unwrap_or(end.saturating_sub(1)).min(end);
            let mut j = open + 1;
            // target specifier such as `assembly:` or `return:`
            let mut targeted = false;
            if (self.is_ident(j) || self.kind(j) == Some(TokenKind::Keyword)) && self.text(j + 1) == ":" {
                targeted = matches!(self.text(j), "assembly" | "module");
                j += 2;
            }
            while j < close {
                let name_start = j;
                let mut name = String::new();
                while j < close && !matches!(self.text(j), "," | "(") {
                    if self.text(j) == "<" {
                        if let Some(g) = self.generic_end(j) {
                            j = g + 1;
                            continue;
                        }
                    }
                    if self.is_ident(j) {
                        name = self.text(j).trim_start_matches('@').to_string();
                    }
                    j += 1;
                }
                let mut arguments = None;
                if self.text(j) == "(" {
                    let m = self.matching(j).unwrap_or(close.saturating_sub(1));
                    arguments = Some(self.slice(j + 1, m).to_string());
                    j = m + 1;
                    while j < close && self.text(j) != "," {
                        j += 1;
                    }
                }
                if !name.is_empty() && !targeted {
                    attrs.push(AttributeUse {
                        name: normalize_attribute(&name),
                        arguments,
                        line: self.line(name_start),
                    });
                }
                if self.text(j) == "," {
                    j += 1;
                }
                if j == name_start {
                    j += 1;
                }
            }
            self.pos = (close + 1).max(open + 1);
        }
        attrs
    }

    fn parse_type(
        &mut self,
        attributes: Vec<AttributeUse>,
        modifiers: Vec<String>,
        start: usize,
        namespace: Option<String>,
        end: usize,
    ) -> Option<TypeDecl> {
        let kind = self.type_keyword_at(self.pos)?;
        if self.text(self.pos) == "record" && matches!(self.text(self.pos + 1), "class" | "struct") {
            self.pos += 1;
        }
        self.pos += 1;
        if !self.is_ident(self.pos) {
            self.diags.push(
                Diagnostic::warning("type declaration without a name skipped")
                    .at_line(self.line(self.pos)),
            );
            self.skip_junk(end);
            return None;
        }
        let name = self.text(self.pos).trim_start_matches('@').to_string();
        self.pos += 1;
        if let Some(g) = self.generic_end(self.pos) {
            self.pos = g + 1;
        }
        if self.text(self.pos) == "(" {
            self.pos = self.skip_group(self.pos);
        }
        let mut base_types = Vec::new();
        if self.text(self.pos) == ":" {
            self.pos += 1;
            let mut item_start = self.pos;
            while self.pos < end && !matches!(self.text(self.pos), "{" | ";" | "where") {
                match self.text(self.pos) {
                    "," => {
                        base_types.push(self.slice(item_start, self.pos).to_string());
                        self.pos += 1;
                        item_start = self.pos;
                    }
                    "(" => self.pos = self.skip_group(self.pos),
                    "<" => self.pos = self.generic_end(self.pos).map_or(self.pos + 1, |g| g + 1),
                    _ => self.pos += 1,
                }
            }
            let last = self.slice(item_start, self.pos).to_string();
            if !last.is_empty() {
                base_types.push(last);
            }
        }
        while self.pos < end && !matches!(self.text(self.pos), "{" | ";" | "}") {
            self.pos = if self.text(self.pos) == "(" { self.skip_group(self.pos) } else { self.pos + 1 };
        }
        let mut decl = TypeDecl {
            kind,
            name,
            namespace,
            modifiers,
            attributes,
            base_types,
            fields: Vec::new(),
            methods: Vec::new(),
            nested: Vec::new(),
            span: LineSpan { start: self.line(start), end: self.line(start) },
            bytes: ByteSpan::default(),
        };
        match self.text(self.pos) {
            "{" => {
                let open = self.pos;
                let close = self.matching(open);
                let body_end = close.unwrap_or(end).min(end);
                if close.is_none() || close.is_some_and(|c| c >= end) {
                    self.diags.push(
                        Diagnostic::error(format!("unbalanced braces: type `{}` is not closed", decl.name))
                            .at_line(self.line(open)),
                    );
                }
                self.pos = open + 1;
                if kind != TypeKind::Enum {
                    self.parse_members(body_end, &mut decl);
                }
                let last = if close.is_some_and(|c| c < end) { body_end } else { body_end.saturating_sub(1) };
                decl.span.end = self.end_line(last.max(open));
                decl.bytes = self.byte_span(start, last.max(open) + 1);
                self.pos = (body_end + 1).min(end.max(body_end));
                if self.pos < end && self.text(self.pos) == ";" {
                    self.pos += 1;
                }
            }
            ";" => {
                decl.span.end = self.line(self.pos);
                decl.bytes = self.byte_span(start, self.pos + 1);
                self.pos += 1;
            }
            _ => {
                decl.span.end = self.line(self.pos.min(end.saturating_sub(1)));
                decl.bytes = self.byte_span(start, self.pos.min(end));
            }
        }
        Some(decl)
    }

    fn parse_members(&mut self, end: usize, decl: &mut TypeDecl) {
        while self.pos < end {
            let i = self.pos;
            if matches!(self.text(i), ";" | "}") {
                self.pos += 1;
                continue;
            }
            let attrs = self.parse_attributes(end);
            let start = self.pos;
            let mods = self.skip_modifiers();
            if self.pos >= end {
                break;
            }
            if self.type_keyword_at(self.pos).is_some() {
                let ns = decl.namespace.clone();
                if let Some(nested) = self.parse_type(attrs, mods, start, ns, end) {
                    decl.nested.push(nested);
                }
            } else if self.text(self.pos) == "delegate" {
                self.skip_junk(end);
            } else {
                self.parse_member(attrs, mods, start, end, decl);
            }
            if self.pos == i {
                self.pos += 1;
            }
        }
    }

    fn parse_member(
        &mut self,
        attributes: Vec<AttributeUse>,
        modifiers: Vec<String>,
        start: usize,
        end: usize,
        decl: &mut TypeDecl,
    ) {
        let header_start = self.pos;
        let mut j = header_start;
        let mut paren = None;
        let mut name_idx = None;
        let mut operator = None;
        let mut conversion = None;
        let terminator = loop {
            if j >= end {
                break None;
            }
            match self.text(j) {
                ";" | "{" | "=>" => break Some(j),
                "=" if paren.is_none() => break Some(j),
                "}" => break None,
                "(" => {
                    // a leading tuple type is not a parameter list
                    let prev = j.checked_sub(1).filter(|&p| p >= header_start);
                    let after_name = prev.is_some_and(|p| {
                        self.is_ident(p) || self.text(p) == ">" || operator.is_some() || conversion.is_some()
                    });
                    if paren.is_none() && after_name {
                        paren = Some(j);
                    }
                    j = self.skip_group(j);
                }
                "[" => j = self.skip_group(j),
                "<" => j = self.generic_end(j).map_or(j + 1, |g| g + 1),
                "operator" => {
                    let kw = self.text(j.saturating_sub(1));
                    if matches!(kw, "implicit" | "explicit") {
                        let target_start = j + 1;
                        let mut k = target_start;
                        while k < end && self.text(k) != "(" {
                            k += 1;
                        }
                        conversion = Some((kw, self.slice(target_start, k).to_string()));
                        j = k;
                    } else {
                        let mut k = j + 1;
                        while k < end && self.text(k) != "(" {
                            k += 1;
                        }
                        operator = Some(self.slice(j + 1, k).replace(char::is_whitespace, ""));
                        j = k;
                    }
                }
                _ => {
                    if paren.is_none() && (self.is_ident(j) || self.text(j) == "this") {
                        name_idx = Some(j);
                    }
                    j += 1;
                }
            }
        };
        let Some(term) = terminator else {
            self.diags.push(
                Diagnostic::warning("incomplete member declaration skipped").at_line(self.line(header_start)),
            );
            self.pos = j.max(header_start + 1).min(end);
            return;
        };

        if let Some(p) = paren.filter(|&p| p < term) {
            self.parse_method_like(attributes, modifiers, start, p, name_idx, operator, conversion, end, decl);
            return;
        }

        let Some(name_i) = name_idx else {
            self.diags.push(
                Diagnostic::warning("member without a name skipped").at_line(self.line(header_start)),
            );
            self.pos = header_start;
            self.skip_junk(end);
            return;
        };

        let type_name = self.slice(header_start, name_i).to_string();
        match self.text(term) {
            "{" | "=>" => {
                // property, indexer or event with accessors
                let name = if self.text(name_i) == "this" { "this[]".to_string() } else { self.text(name_i).trim_start_matches('@').to_string() };
                let line = self.line(name_i);
                self.pos = if self.text(term) == "{" { self.skip_group(term) } else { term + 1 };
                let mut initializer = None;
                if self.text(term) == "=>" || self.text(self.pos) == "=" {
                    let init_start = if self.text(term) == "=>" { term + 1 } else { self.pos + 1 };
                    let stop = self.expression_end(init_start, end);
                    initializer = Some(self.slice(init_start, stop).to_string());
                    self.pos = stop;
                }
                if self.text(self.pos) == ";" {
                    self.pos += 1;
                }
                decl.fields.push(FieldDecl {
                    name,
                    type_name: strip_event(&type_name),
                    is_property: true,
                    modifiers,
                    attributes,
                    initializer,
                    line,
                });
            }
            _ => {
                // field declarators: `T a = x, b;`
                let mut k = name_i;
                loop {
                    let name = self.text(k).trim_start_matches('@').to_string();
                    let line = self.line(k);
                    let mut next = k + 1;
                    let mut initializer = None;
                    if self.text(next) == "[" {
                        next = self.skip_group(next);
                    }
                    if self.text(next) == "=" {
                        let stop = self.expression_end(next + 1, end);
                        initializer = Some(self.slice(next + 1, stop).to_string());
                        next = stop;
                    }
                    decl.fields.push(FieldDecl {
                        name,
                        type_name: strip_event(&type_name),
                        is_property: false,
                        modifiers: modifiers.clone(),
                        attributes: attributes.clone(),
                        initializer,
                        line,
                    });
                    if self.text(next) == "," && self.is_ident(next + 1) {
                        k = next + 1;
                        continue;
                    }
                    self.pos = next;
                    break;
                }
                while self.pos < end && !matches!(self.text(self.pos), ";" | "}") {
                    self.pos = match self.text(self.pos) {
                        "(" | "[" | "{" => self.skip_group(self.pos),
                        _ => self.pos + 1,
                    };
                }
                if self.text(self.pos) == ";" {
                    self.pos += 1;
                }
            }
        }
    }

    /// Index of the `,` or `;` ending an initializer expression starting at
    /// `i`, at bracket depth zero.
    pub(super) fn expression_end(&self, i: usize, end: usize) -> usize {
        let mut j = i;
        while j < end {
            match self.text(j) {
                "," | ";" | "}" => return j,
                "(" | "[" | "{" => j = self.skip_group(j),
                "<" => j = self.generic_end_in_expr(j).map_or(j + 1, |g| g + 1),
                _ => j += 1,
            }
        }
        end
    }

    #[allow(clippy::too_many_arguments)]
    fn parse_method_like(
        &mut self,
        attributes: Vec<AttributeUse>,
        modifiers: Vec<String>,
        start: usize,
        paren: usize,
        name_idx: Option<usize>,
        operator: Option<String>,
        conversion: Option<(&str, String)>,
        end: usize,
        decl: &mut TypeDecl,
    ) {
        let header_start = self.pos;
        let (name, kind, return_type, conversion_target) = if let Some((kw, target)) = conversion {
            let name = if kw == "implicit" { "op_Implicit" } else { "op_Explicit" };
            (name.to_string(), MethodKind::Conversion, Some(target.clone()), Some(target))
        } else if let Some(op) = operator {
            let op_kw = (header_start..paren).find(|&k| self.text(k) == "operator").unwrap_or(paren);
            let ret = self.slice(header_start, op_kw).to_string();
            (format!("operator{op}"), MethodKind::Operator, Some(ret), None)
        } else {
            let name_i = name_idx.unwrap_or(paren.saturating_sub(1));
            let name = self.text(name_i).trim_start_matches('@').to_string();
            let before = self.slice(header_start, name_i).trim().to_string();
            if before == "~" {
                (name, MethodKind::Destructor, None, None)
            } else if before.is_empty() && name == decl.name {
                (name, MethodKind::Constructor, None, None)
            } else {
                let ret = (!before.is_empty()).then_some(before);
                (name, MethodKind::Method, ret, None)
            }
        };
        let close = self.matching(paren).unwrap_or(paren);
        let parameters_text = self.slice(paren + 1, close).to_string();
        let parameters = self.parse_parameters(paren, close);

        let mut j = close + 1;
        while j < end && !matches!(self.text(j), "{" | "=>" | ";" | "}") {
            j = match self.text(j) {
                "(" | "[" => self.skip_group(j),
                _ => j + 1,
            };
        }
        let span_start = self.line(start);
        let mut method = MethodDecl {
            name,
            kind,
            modifiers,
            attributes,
            return_type,
            conversion_target,
            parameters,
            parameters_text,
            has_body: false,
            statements: Vec::new(),
            body_loc: 0,
            span: LineSpan { start: span_start, end: span_start },
            bytes: ByteSpan::default(),
        };
        match self.text(j) {
            "{" => {
                method.has_body = true;
                let mut stmts = Vec::new();
                let outcome = self.parse_block_into(j, 0, end, &mut stmts);
                let last = match outcome {
                    Ok(next) => {
                        self.pos = next;
                        next.saturating_sub(1)
                    }
                    Err(recover_at) => {
                        self.diags.push(
                            Diagnostic::error(format!(
                                "unbalanced braces: body of `{}` is not closed",
                                method.name
                            ))
                            .at_line(self.line(j)),
                        );
                        self.pos = recover_at;
                        recover_at.saturating_sub(1)
                    }
                };
                method.statements = stmts;
                method.span.end = self.end_line(last.max(j));
                method.bytes = self.byte_span(start, last.max(j) + 1);
            }
            "=>" => {
                method.has_body = true;
                let stop = (j + 1..end).find(|&k| self.text(k) == ";" ).unwrap_or(end);
                let stop = self.statement_end_from(j + 1, end).unwrap_or(stop);
                let stmt = self.make_statement(j + 1, stop, 0, None);
                method.statements.push(stmt);
                method.span.end = self.end_line(stop.min(end.saturating_sub(1)));
                method.bytes = self.byte_span(start, (stop + 1).min(end));
                self.pos = if self.text(stop) == ";" { stop + 1 } else { stop };
            }
            ";" => {
                method.span.end = self.line(j);
                method.bytes = self.byte_span(start, j + 1);
                self.pos = j + 1;
            }
            _ => {
                method.span.end = self.end_line(j.saturating_sub(1));
                method.bytes = self.byte_span(start, j);
                self.pos = j.max(header_start + 1);
            }
        }
        if method.has_body {
            method.body_loc = self.flags.code_lines_between(method.span.start, method.span.end).max(1);
        }
        decl.methods.push(method);
    }

    fn parse_parameters(&self, open: usize, close: usize) -> Vec<Parameter> {
        if close <= open + 1 {
            return Vec::new();
        }
        let mut params = Vec::new();
        for (a, b) in self.split_commas(open + 1, close) {
            let mut a = a;
            while a < b && self.text(a) == "[" {
                a = self.skip_group(a);
            }
            while a < b && matches!(self.text(a), "this" | "ref" | "out" | "in" | "params" | "scoped" | "readonly") {
                a += 1;
            }
            let stop = (a..b).find(|&k| self.text(k) == "=").unwrap_or(b);
            let name_i = (a..stop).rev().find(|&k| self.is_ident(k));
            if let Some(n) = name_i {
                params.push(Parameter {
                    name: self.text(n).trim_start_matches('@').to_string(),
                    type_name: self.slice(a, n).to_string(),
                });
            }
        }
        params
    }

    /// Split `a..b` at depth-zero commas.
    pub(super) fn split_commas(&self, a: usize, b: usize) -> Vec<(usize, usize)> {
        let mut parts = Vec::new();
        let mut start = a;
        let mut j = a;
        while j < b {
            match self.text(j) {
                "," => {
                    parts.push((start, j));
                    start = j + 1;
                    j += 1;
                }
                "(" | "[" | "{" => j = self.skip_group(j).min(b),
                "<" => j = self.generic_end_in_expr(j).filter(|&g| g < b).map_or(j + 1, |g| g + 1),
                _ => j += 1,
            }
        }
        if start < b {
            parts.push((start, b));
        }
        parts.retain(|(s, e)| s < e);
        parts
    }
}

fn strip_event(type_text: &str) -> String {
    type_text.strip_prefix("event").map(str::trim).unwrap_or(type_text).to_string()
}

/// `NUnit.Framework.TestAttribute` -> `Test`.
pub fn normalize_attribute(name: &str) -> String {
    let last = name.rsplit(['.', ':']).next().unwrap_or(name);
    match last.strip_suffix("Attribute") {
        Some(stem) if !stem.is_empty() => stem.to_string(),
        _ => last.to_string(),
    }
}
