use super::ast::{ObjectBinding, PlanProgram, Statement};

/// Canonical rendering: one binding or call per line, double-quoted strings,
/// bindings interleaved with statements in their original order.
pub fn pretty_print(program: &PlanProgram) -> String {
    let mut out = String::new();
    let mut next_binding = 0;
    for stmt in &program.statements {
        while next_binding < stmt.after_bindings.min(program.bindings.len()) {
            push_binding(&mut out, &program.bindings[next_binding]);
            next_binding += 1;
        }
        push_statement(&mut out, stmt);
    }
    for binding in &program.bindings[next_binding..] {
        push_binding(&mut out, binding);
    }
    out
}

fn push_binding(out: &mut String, b: &ObjectBinding) {
    out.push_str(&format!("{} = InteractionObject({}", b.var_name, quote(&b.category)));
    if let Some(landmark) = &b.landmark {
        out.push_str(&format!(", landmark = {}", quote(landmark)));
    }
    if let Some(attrs) = &b.attributes {
        let items: Vec<String> = attrs.iter().map(|a| quote(a)).collect();
        out.push_str(&format!(", attributes = [{}]", items.join(", ")));
    }
    out.push_str(")\n");
}

fn push_statement(out: &mut String, s: &Statement) {
    let arg = s.arg.as_deref().unwrap_or("");
    out.push_str(&format!("{}.{}({})\n", s.receiver, s.method.source_name(), arg));
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            q.push('\\');
        }
        q.push(ch);
    }
    q.push('"');
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::dsl::parse_plan;

    #[test]
    fn canonical_form() {
        let src = "a=InteractionObject('Apple',attributes=['sliced'])  # x\nf = InteractionObject('Fridge')\na.pickup()\na.place(f)\n";
        let p = parse_plan(src, &Catalog::builtin()).unwrap();
        assert_eq!(
            pretty_print(&p),
            "a = InteractionObject(\"Apple\", attributes = [\"sliced\"])\nf = InteractionObject(\"Fridge\")\na.pickup()\na.place(f)\n"
        );
    }

    #[test]
    fn trailing_bindings_are_kept() {
        let src = "a = InteractionObject('Apple')\na.go_to()\nb = InteractionObject('Bowl')\n";
        let p = parse_plan(src, &Catalog::builtin()).unwrap();
        assert!(pretty_print(&p).ends_with("b = InteractionObject(\"Bowl\")\n"));
    }
}
