//! Statement-level parsing for method bodies: flattening, classification and
//! expression facts (invocations, creations, locals, assignments).

use super::lexer::TokenKind;
use super::parser::{Parser, MEMBER_ONLY};
use super::syntax::*;
use crate::diag::Diagnostic;

const ASSIGN_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "??=", "<<=",
];

/// Contextual identifiers that may directly precede an invoked name.
const CALL_PREFIX_IDENTS: &[&str] = &["await", "select", "where", "orderby", "on", "equals", "by", "yield"];

const NOT_CALLS: &[&str] = &["nameof", "var", "when"];

struct Found {
    inv: InvocationExpr,
    name_offset: usize,
    args: ByteSpan,
}

impl<'s> Parser<'s> {
    /// Parse the block opened at `open`. `Ok` carries the index after the
    /// closing brace; `Err` the index where a member declaration was found
    /// instead of the expected close.
    pub(super) fn parse_block_into(
        &mut self,
        open: usize,
        depth: u32,
        end: usize,
        out: &mut Vec<Statement>,
    ) -> Result<usize, usize> {
        let close = self.matching(open).filter(|&c| c < end);
        let stop = close.unwrap_or(end);
        let mut i = open + 1;
        while i < stop {
            i = self.parse_statement(i, stop, depth, out)?;
        }
        match close {
            Some(c) => Ok(c + 1),
            None => Err(stop),
        }
    }

    fn parse_statement(
        &mut self,
        i: usize,
        end: usize,
        depth: u32,
        out: &mut Vec<Statement>,
    ) -> Result<usize, usize> {
        if i >= end {
            return Ok(end);
        }
        let t = self.text(i);
        let kind = self.kind(i);
        if kind == Some(TokenKind::Keyword) && MEMBER_ONLY.contains(&t) {
            return Err(i);
        }
        if kind == Some(TokenKind::AttributeBracket) && t == "[" {
            let after = self.skip_group(i);
            let next = self.text(after);
            if MEMBER_ONLY.contains(&next) || self.kind(after) == Some(TokenKind::AttributeBracket) {
                return Err(i);
            }
            return Ok(after.min(end));
        }
        match t {
            "{" => return self.parse_block_into(i, depth + 1, end, out),
            ";" | "}" => return Ok(i + 1),
            _ => {}
        }
        let header_kw = if t == "await" && matches!(self.text(i + 1), "foreach" | "using") {
            i + 1
        } else {
            i
        };
        match self.text(header_kw) {
            "if" | "while" | "for" | "foreach" | "lock" | "fixed" | "switch" | "using"
                if self.kind(header_kw) == Some(TokenKind::Keyword) =>
            {
                if self.text(header_kw + 1) != "(" {
                    if self.text(header_kw) == "using" {
                        return self.generic_statement(i, end, depth, out);
                    }
                    self.push(i, header_kw + 1, depth, Some(StatementKind::Control), out);
                    return self.parse_embedded(header_kw + 1, end, depth + 1, out);
                }
                let close = self.matching(header_kw + 1).filter(|&c| c < end).unwrap_or(end - 1);
                let mut stmt = self.make_statement(i, close + 1, depth, Some(StatementKind::Control));
                stmt.locals.extend(self.header_locals(header_kw, close));
                out.push(stmt);
                if self.text(header_kw) == "switch" {
                    return self.parse_switch(close + 1, depth, end, out);
                }
                return self.parse_embedded(close + 1, end, depth + 1, out);
            }
            _ => {}
        }
        match t {
            "else" => {
                self.push(i, i + 1, depth, Some(StatementKind::Control), out);
                if self.text(i + 1) == "if" {
                    return self.parse_statement(i + 1, end, depth, out);
                }
                self.parse_embedded(i + 1, end, depth + 1, out)
            }
            "do" => {
                self.push(i, i + 1, depth, Some(StatementKind::Control), out);
                let j = self.parse_embedded(i + 1, end, depth + 1, out)?;
                if self.text(j) == "while" && j < end {
                    let close = self.matching(j + 1).filter(|&c| c < end).unwrap_or(j);
                    self.push(j, close + 1, depth, Some(StatementKind::Control), out);
                    let next = close + 1;
                    return Ok(if self.text(next) == ";" { next + 1 } else { next }.min(end));
                }
                Ok(j)
            }
            "try" => {
                self.push(i, i + 1, depth, Some(StatementKind::Control), out);
                let mut j = self.parse_embedded(i + 1, end, depth + 1, out)?;
                while j < end {
                    match self.text(j) {
                        "catch" => {
                            let mut h = j + 1;
                            if self.text(h) == "(" {
                                h = self.skip_group(h);
                            }
                            if self.text(h) == "when" && self.text(h + 1) == "(" {
                                h = self.skip_group(h + 1);
                            }
                            let h = h.min(end);
                            let mut stmt = self.make_statement(j, h, depth, Some(StatementKind::Control));
                            if self.text(j + 1) == "(" {
                                let close = self.matching(j + 1).unwrap_or(j + 1);
                                stmt.locals.extend(self.local_decl(j + 2, close).unwrap_or_default());
                            }
                            out.push(stmt);
                            j = self.parse_embedded(h, end, depth + 1, out)?;
                        }
                        "finally" => {
                            self.push(j, j + 1, depth, Some(StatementKind::Control), out);
                            j = self.parse_embedded(j + 1, end, depth + 1, out)?;
                        }
                        _ => break,
                    }
                }
                Ok(j)
            }
            "checked" | "unchecked" | "unsafe" if self.text(i + 1) == "{" => {
                self.parse_block_into(i + 1, depth + 1, end, out)
            }
            _ if kind == Some(TokenKind::Identifier)
                && self.text(i + 1) == ":"
                && self.text(i + 2) != ":" =>
            {
                // label
                Ok(i + 2)
            }
            _ => self.generic_statement(i, end, depth, out),
        }
    }

    /// Body of a control statement: a block's statements take `depth`
    /// directly instead of nesting one level further.
    fn parse_embedded(
        &mut self,
        i: usize,
        end: usize,
        depth: u32,
        out: &mut Vec<Statement>,
    ) -> Result<usize, usize> {
        if i < end && self.text(i) == "{" {
            return self.parse_block_into(i, depth, end, out);
        }
        self.parse_statement(i, end, depth, out)
    }

    fn generic_statement(
        &mut self,
        i: usize,
        end: usize,
        depth: u32,
        out: &mut Vec<Statement>,
    ) -> Result<usize, usize> {
        // elided code (`...`) in excerpts is not part of the statement
        let mut i = i;
        while i < end && matches!(self.text(i), ".." | ".") {
            i += 1;
        }
        if i >= end || self.text(i) == "}" {
            return Ok(i);
        }
        let mut j = i;
        loop {
            if j >= end {
                self.diags.push(
                    Diagnostic::warning("statement without terminating semicolon").at_line(self.line(i)),
                );
                self.push(i, end, depth, None, out);
                return Ok(end);
            }
            let t = self.text(j);
            match t {
                ";" => {
                    self.push(i, j, depth, None, out);
                    return Ok(j + 1);
                }
                "(" | "[" => j = self.skip_group(j),
                "{" => {
                    if self.is_local_function(i, j) {
                        self.push(i, j, depth, Some(StatementKind::LocalDeclaration), out);
                        return self.parse_block_into(j, depth + 1, end, out);
                    }
                    if self.matching(j).is_some_and(|m| m < end) {
                        j = self.skip_group(j);
                    } else {
                        j += 1;
                    }
                }
                "}" => {
                    self.diags.push(
                        Diagnostic::warning("statement without terminating semicolon").at_line(self.line(i)),
                    );
                    self.push(i, j, depth, None, out);
                    return Ok(j);
                }
                _ if j > i
                    && self.kind(j) == Some(TokenKind::Keyword)
                    && MEMBER_ONLY.contains(&t) =>
                {
                    self.push(i, j, depth, None, out);
                    return Err(j);
                }
                _ => j += 1,
            }
        }
    }

    /// `{` at `brace` opens a local function body when the statement so far
    /// looks like `ReturnType Name(params)`.
    fn is_local_function(&self, start: usize, brace: usize) -> bool {
        if brace == 0 || self.text(brace - 1) != ")" {
            return false;
        }
        let Some(open) = self.matching(brace - 1) else {
            return false;
        };
        if open <= start + 1 {
            return false;
        }
        let mut name = open - 1;
        if self.text(name) == ">" {
            match self.generic_start(name) {
                Some(g) if g > start + 1 => name = g - 1,
                _ => return false,
            }
        }
        if !self.is_ident(name) || name <= start {
            return false;
        }
        let before = name - 1;
        let typed = self.is_ident(before)
            || self.is_type_keyword(before)
            || matches!(self.text(before), ">" | "]" | "?");
        typed && !(start..name).any(|k| ASSIGN_OPS.contains(&self.text(k)) || self.text(k) == "new")
    }

    fn parse_switch(
        &mut self,
        open: usize,
        depth: u32,
        end: usize,
        out: &mut Vec<Statement>,
    ) -> Result<usize, usize> {
        if self.text(open) != "{" || open >= end {
            return Ok(open.min(end));
        }
        let close = self.matching(open).filter(|&c| c < end);
        let stop = close.unwrap_or(end);
        let mut k = open + 1;
        while k < stop {
            let t = self.text(k);
            if t == "case" || (t == "default" && self.text(k + 1) == ":") {
                let mut m = k + 1;
                while m < stop && self.text(m) != ":" {
                    m = match self.text(m) {
                        "(" | "[" | "{" => self.skip_group(m),
                        _ => m + 1,
                    };
                }
                let label_end = (m + 1).min(stop);
                self.push(k, label_end, depth + 1, Some(StatementKind::Control), out);
                k = label_end;
            } else {
                k = self.parse_statement(k, stop, depth + 2, out)?;
            }
        }
        match close {
            Some(c) => Ok(c + 1),
            None => Err(stop),
        }
    }

    fn push(&self, a: usize, b: usize, depth: u32, kind: Option<StatementKind>, out: &mut Vec<Statement>) {
        if a < b {
            out.push(self.make_statement(a, b, depth, kind));
        }
    }

    /// Index of the depth-zero `;` at or after `i`.
    pub(super) fn statement_end_from(&self, i: usize, end: usize) -> Option<usize> {
        let mut j = i;
        while j < end {
            match self.text(j) {
                ";" => return Some(j),
                "(" | "[" | "{" => j = self.skip_group(j),
                _ => j += 1,
            }
        }
        None
    }

    /// Build a statement from tokens `a..b`; `kind` overrides classification.
    pub(super) fn make_statement(&self, a: usize, b: usize, depth: u32, kind: Option<StatementKind>) -> Statement {
        let b = b.max(a).min(self.toks.len());
        let (invocations, creations) = self.extract_calls(a, b);
        let mut locals = Vec::new();
        let mut assignments = Vec::new();
        let kind = kind.unwrap_or_else(|| {
            let first = self.text(a);
            if first == "yield" && matches!(self.text(a + 1), "return" | "break") {
                StatementKind::Yield
            } else if first == "return" {
                StatementKind::Return
            } else if matches!(first, "throw" | "break" | "continue" | "goto") {
                StatementKind::Control
            } else if let Some(decls) = self.local_decl(a, b) {
                locals = decls;
                StatementKind::LocalDeclaration
            } else if let Some(asg) = self.assignment(a, b) {
                assignments.push(asg);
                StatementKind::Assignment
            } else if !invocations.is_empty() || !creations.is_empty() || first == "await" {
                StatementKind::Invocation
            } else if let Some(asg) = self.increment(a, b) {
                assignments.push(asg);
                StatementKind::Assignment
            } else {
                StatementKind::Opaque
            }
        });
        locals.extend(self.out_locals(a, b));
        let mut identifiers = Vec::new();
        let mut string_literals = Vec::new();
        for k in a..b {
            let tok = self.toks[k];
            match tok.kind {
                TokenKind::Identifier => {
                    let prev = if k > a { self.text(k - 1) } else { "" };
                    let qualified = matches!(prev, "." | "?." | "::")
                        && !(prev == "." && k >= a + 2 && self.text(k - 2) == "this");
                    identifiers.push(IdentRef {
                        name: tok.text.trim_start_matches('@').to_string(),
                        qualified,
                        offset: tok.offset,
                    });
                }
                TokenKind::StringLiteral | TokenKind::InterpolatedString => {
                    string_literals.push(literal_content(tok.text).to_string());
                }
                _ => {}
            }
        }
        Statement {
            kind,
            depth,
            line: self.line(a),
            span: self.byte_span(a, b),
            raw_text: self.slice(a, b).to_string(),
            invocations,
            creations,
            locals,
            assignments,
            identifiers,
            string_literals,
        }
    }

    /// Variables introduced by a `for`/`foreach`/`using`/`fixed` header whose
    /// parenthesis closes at `close`.
    fn header_locals(&self, kw: usize, close: usize) -> Vec<LocalVar> {
        let open = kw + 1;
        match self.text(kw) {
            "for" => {
                let stop = (open + 1..close).find(|&k| self.text(k) == ";").unwrap_or(close);
                self.local_decl(open + 1, stop).unwrap_or_default()
            }
            "foreach" | "using" | "fixed" => self.local_decl(open + 1, close).unwrap_or_default(),
            _ => Vec::new(),
        }
    }

    /// Index after a type starting at `j`, if one is there.
    fn type_end(&self, j: usize, b: usize) -> Option<usize> {
        let mut k = if self.is_ident(j) || self.is_type_keyword(j) {
            j + 1
        } else if self.text(j) == "(" {
            let m = self.matching(j).filter(|&m| m < b)?;
            if !(j + 1..m).any(|x| self.text(x) == ",") {
                return None;
            }
            m + 1
        } else {
            return None;
        };
        while k < b {
            match self.text(k) {
                "." | "::" if self.is_ident(k + 1) => k += 2,
                "<" => match self.generic_end(k) {
                    Some(g) if g < b => k = g + 1,
                    _ => return None,
                },
                "?" | "*" => k += 1,
                "[" => {
                    let m = self.matching(k).filter(|&m| m < b)?;
                    if (k + 1..m).all(|x| self.text(x) == ",") {
                        k = m + 1;
                    } else {
                        break;
                    }
                }
                _ => break,
            }
        }
        Some(k)
    }

    /// Local variable declaration in `a..b`, e.g. `var x = ...` or
    /// `Foo a, b = c`.
    pub(super) fn local_decl(&self, a: usize, b: usize) -> Option<Vec<LocalVar>> {
        let mut j = a;
        loop {
            match self.text(j) {
                "using" | "const" | "ref" | "readonly" | "scoped" | "static" => j += 1,
                "await" if self.text(j + 1) == "using" => j += 1,
                _ => break,
            }
        }
        if j >= b || self.text(j) == "this" {
            return None;
        }
        let type_start = j;
        let type_end = self.type_end(j, b)?;
        let type_name = self.slice(type_start, type_end).replace(char::is_whitespace, "");
        if self.text(type_start) == "var" && self.text(type_end) == "(" {
            let m = self.matching(type_end).filter(|&m| m < b)?;
            if self.text(m + 1) != "=" {
                return None;
            }
            let locals = (type_end + 1..m)
                .filter(|&k| self.is_ident(k) && matches!(self.text(k + 1), "," | ")"))
                .map(|k| LocalVar {
                    name: self.text(k).trim_start_matches('@').to_string(),
                    type_name: "var".into(),
                    initializer: None,
                    line: self.line(k),
                })
                .collect::<Vec<_>>();
            return (!locals.is_empty()).then_some(locals);
        }
        if type_end >= b || !self.is_ident(type_end) {
            return None;
        }
        let mut locals = Vec::new();
        for (n, (s, e)) in self.split_commas(type_end, b).into_iter().enumerate() {
            let ok = self.is_ident(s) && (s + 1 == e || matches!(self.text(s + 1), "=" | "in" | "["));
            if !ok {
                if n == 0 {
                    return None;
                }
                break;
            }
            let initializer = (self.text(s + 1) == "=").then(|| self.slice(s + 2, e).to_string());
            locals.push(LocalVar {
                name: self.text(s).trim_start_matches('@').to_string(),
                type_name: type_name.clone(),
                initializer,
                line: self.line(s),
            });
        }
        (!locals.is_empty()).then_some(locals)
    }

    /// `out var x` / `out T x` declarations anywhere in `a..b`.
    fn out_locals(&self, a: usize, b: usize) -> Vec<LocalVar> {
        let mut locals = Vec::new();
        for k in a..b {
            if self.text(k) != "out" {
                continue;
            }
            if let Some(te) = self.type_end(k + 1, b) {
                if te < b && self.is_ident(te) && matches!(self.text(te + 1), ")" | ",") {
                    locals.push(LocalVar {
                        name: self.text(te).trim_start_matches('@').to_string(),
                        type_name: self.slice(k + 1, te).replace(char::is_whitespace, ""),
                        initializer: None,
                        line: self.line(te),
                    });
                }
            }
        }
        locals
    }

    /// First depth-zero assignment in `a..b`.
    fn assignment(&self, a: usize, b: usize) -> Option<Assignment> {
        let mut j = a;
        while j < b {
            let t = self.text(j);
            if ASSIGN_OPS.contains(&t) && j > a {
                let start = self.chain_start(j - 1, a)?;
                return Some(Assignment {
                    target: self.slice(start, j).replace(char::is_whitespace, ""),
                    operator: t.to_string(),
                    value: self.slice(j + 1, b).to_string(),
                    line: self.line(start),
                });
            }
            j = match t {
                "(" | "[" | "{" => self.skip_group(j),
                "<" => self.generic_end_in_expr(j).map_or(j + 1, |g| g + 1),
                _ => j + 1,
            };
        }
        None
    }

    fn increment(&self, a: usize, b: usize) -> Option<Assignment> {
        let (op, start, stop) = if matches!(self.text(a), "++" | "--") {
            (a, a + 1, b)
        } else if b > a + 1 && matches!(self.text(b - 1), "++" | "--") {
            (b - 1, a, b - 1)
        } else {
            return None;
        };
        let first = self.chain_start(stop.checked_sub(1)?, start)?;
        (first == start).then(|| Assignment {
            target: self.slice(start, stop).replace(char::is_whitespace, ""),
            operator: self.text(op).to_string(),
            value: String::new(),
            line: self.line(a),
        })
    }

    /// Start of the member-access chain ending at token `k`, not before `lo`.
    fn chain_start(&self, mut k: usize, lo: usize) -> Option<usize> {
        let is_segment = |p: &Self, i: usize| {
            p.is_ident(i) || p.is_type_keyword(i) || matches!(p.text(i), "this" | "base")
        };
        loop {
            match self.text(k) {
                ")" | "]" => {
                    let o = self.matching(k)?;
                    if o < lo {
                        return None;
                    }
                    if o == lo {
                        return Some(o);
                    }
                    let p = o - 1;
                    if is_segment(self, p) || matches!(self.text(p), ">" | ")" | "]") {
                        k = p;
                        continue;
                    }
                    return Some(o);
                }
                ">" => {
                    let g = self.generic_start(k)?;
                    if g <= lo {
                        return None;
                    }
                    k = g - 1;
                    continue;
                }
                _ if is_segment(self, k) => {}
                _ => return None,
            }
            if k >= lo + 2 && matches!(self.text(k - 1), "." | "?." | "::") {
                let mut before = k - 2;
                if self.text(before) == "!" && before > lo {
                    before -= 1;
                }
                if is_segment(self, before) || matches!(self.text(before), ")" | "]" | ">") {
                    k = before;
                    continue;
                }
            }
            return Some(k);
        }
    }

    /// Receiver chain segments for the expression `start..=name`.
    fn receiver_chain(&self, start: usize, name: usize) -> Vec<String> {
        let mut chain = Vec::new();
        let mut k = start;
        while k <= name {
            match self.text(k) {
                "(" | "[" => k = self.skip_group(k),
                "<" => k = self.generic_end(k).map_or(k + 1, |g| g + 1),
                t if self.is_ident(k) || self.is_type_keyword(k) || matches!(t, "this" | "base") => {
                    chain.push(t.trim_start_matches('@').to_string());
                    k += 1;
                }
                _ => k += 1,
            }
        }
        chain
    }

    /// Invocations and object creations in `a..b`, in source order.
    fn extract_calls(&self, a: usize, b: usize) -> (Vec<InvocationExpr>, Vec<ObjectCreation>) {
        let mut found: Vec<Found> = Vec::new();
        let mut creations = Vec::new();
        for i in a..b {
            if self.text(i) == "new" && self.kind(i) == Some(TokenKind::Keyword) {
                if let Some(c) = self.creation_at(i, b) {
                    creations.push(c);
                }
                continue;
            }
            if !self.is_ident(i) || NOT_CALLS.contains(&self.text(i)) {
                continue;
            }
            let (open, generic) = match self.text(i + 1) {
                "(" => (i + 1, false),
                "<" => match self.generic_end(i + 1) {
                    Some(g) if self.text(g + 1) == "(" => (g + 1, true),
                    _ => continue,
                },
                _ => continue,
            };
            if open >= b {
                continue;
            }
            if i > a && self.is_declaration_name(i - 1) {
                continue;
            }
            let Some(close) = self.matching(open).filter(|&c| c < b) else {
                continue;
            };
            let start = self.chain_start(i, a).unwrap_or(i);
            let parts = if close == open + 1 { Vec::new() } else { self.split_commas(open + 1, close) };
            let argument_kinds = parts.iter().map(|&(s, e)| self.argument_kind(s, e)).collect();
            let arguments = parts.iter().map(|&(s, e)| self.slice(s, e).to_string()).collect();
            found.push(Found {
                inv: InvocationExpr {
                    receiver_chain: self.receiver_chain(start, i),
                    generic,
                    argument_count: parts.len(),
                    argument_kinds,
                    arguments,
                    calls_in_arguments: Vec::new(),
                    raw_text: self.slice(start, close + 1).to_string(),
                    line: self.line(start),
                    span: self.byte_span(start, close + 1),
                },
                name_offset: self.toks[i].offset,
                args: self.byte_span(open, close + 1),
            });
        }
        let offsets: Vec<(usize, String)> =
            found.iter().map(|f| (f.name_offset, f.inv.member().to_string())).collect();
        let invocations = found
            .into_iter()
            .map(|mut f| {
                f.inv.calls_in_arguments = offsets
                    .iter()
                    .filter(|(o, _)| *o > f.args.start && *o < f.args.end)
                    .map(|(_, n)| n.clone())
                    .collect();
                f.inv
            })
            .collect();
        (invocations, creations)
    }

    /// Whether token `p`, directly before a name followed by `(`, makes that
    /// name a declaration rather than a call.
    fn is_declaration_name(&self, p: usize) -> bool {
        let t = self.text(p);
        if self.is_ident(p) {
            return !CALL_PREFIX_IDENTS.contains(&t);
        }
        if self.is_type_keyword(p) || t == "new" {
            return true;
        }
        if t == ">" {
            return self.generic_start(p).is_some_and(|g| g > 0 && self.is_ident(g - 1));
        }
        t == "]" && p > 0 && self.text(p - 1) == "["
    }

    fn creation_at(&self, i: usize, b: usize) -> Option<ObjectCreation> {
        let j = i + 1;
        if j >= b || !(self.is_ident(j) || self.is_type_keyword(j)) {
            return None;
        }
        let mut k = j;
        let mut last = j;
        loop {
            if self.is_ident(k) || self.is_type_keyword(k) {
                last = k;
                k += 1;
            }
            match self.text(k) {
                "." | "::" if self.is_ident(k + 1) => k += 1,
                "<" => match self.generic_end(k) {
                    Some(g) => {
                        k = g + 1;
                        break;
                    }
                    None => break,
                },
                _ => break,
            }
        }
        if self.text(k) == "?" {
            k += 1;
        }
        let type_text = self.slice(j, k).replace(char::is_whitespace, "");
        let type_name = self.text(last).trim_start_matches('@').to_string();
        match self.text(k) {
            "(" => {
                let m = self.matching(k).filter(|&m| m < b)?;
                let parts = if m == k + 1 { 0 } else { self.split_commas(k + 1, m).len() };
                let mut span_end = m + 1;
                if self.text(span_end) == "{" {
                    span_end = self.skip_group(span_end);
                }
                Some(ObjectCreation {
                    type_name,
                    type_text,
                    argument_count: parts,
                    arguments_text: self.slice(k + 1, m).to_string(),
                    line: self.line(i),
                    span: self.byte_span(i, span_end.min(b)),
                })
            }
            "{" => Some(ObjectCreation {
                type_name,
                type_text,
                argument_count: 0,
                arguments_text: String::new(),
                line: self.line(i),
                span: self.byte_span(i, self.skip_group(k).min(b)),
            }),
            _ => None,
        }
    }

    fn argument_kind(&self, a: usize, b: usize) -> ArgumentKind {
        let mut a = a;
        if self.is_ident(a) && self.text(a + 1) == ":" && a + 2 < b {
            a += 2;
        }
        while a < b && matches!(self.text(a), "ref" | "out" | "in") {
            a += 1;
        }
        if a >= b {
            return ArgumentKind::Other;
        }
        if self.text(a) == "delegate" {
            return ArgumentKind::Lambda;
        }
        let mut j = a;
        while j < b {
            match self.text(j) {
                "=>" => return ArgumentKind::Lambda,
                "(" | "[" | "{" => j = self.skip_group(j),
                _ => j += 1,
            }
        }
        let first = self.kind(a);
        let single = b - a == 1;
        match first {
            Some(TokenKind::StringLiteral) if single || self.text(a + 1) == "+" => ArgumentKind::StringLiteral,
            Some(TokenKind::InterpolatedString) if single || self.text(a + 1) == "+" => {
                ArgumentKind::InterpolatedString
            }
            Some(TokenKind::Number) if single => ArgumentKind::NumberLiteral,
            _ if b - a == 2 && self.text(a) == "-" && self.kind(a + 1) == Some(TokenKind::Number) => {
                ArgumentKind::NumberLiteral
            }
            _ => ArgumentKind::Other,
        }
    }
}

/// Text between the quotes of a string literal token.
pub fn literal_content(text: &str) -> &str {
    let body = text.trim_start_matches(['$', '@']);
    let quotes = body.len() - body.trim_start_matches('"').len();
    let quotes = if quotes >= 3 { quotes } else { quotes.min(1) };
    let inner = &body[quotes..];
    let trail = inner.len() - inner.trim_end_matches('"').len();
    let trail = trail.min(quotes);
    &inner[..inner.len() - trail]
}
