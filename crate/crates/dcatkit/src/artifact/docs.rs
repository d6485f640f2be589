//! Markdown documentation for a compiled profile: one page per class, an
//! index, and a layer overview page.

use crate::ir::{MaxCard, RangeSpec, SchemaIR};
use std::collections::BTreeMap;

/// Returns filename -> content; callers write the map to a directory.
pub fn gen_docs(ir: &SchemaIR) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();

    let mut index = String::new();
    index.push_str(&format!("# Profile `{}`\n\n", ir.id));
    index.push_str(&format!("Version: {}\n\n", ir.version));
    index.push_str("See [layers](layers.md) for the import chain.\n\n");
    if !ir.classes.is_empty() {
        index.push_str("## Classes\n\n");
        for (name, class) in &ir.classes {
            let flags = match (class.is_mixin, class.is_abstract) {
                (true, _) => " (mixin)",
                (_, true) => " (abstract)",
                _ => "",
            };
            index.push_str(&format!(
                "- [{name}]({name}.md){flags} — `{}`\n",
                class.class_uri
            ));
        }
        index.push('\n');
    }
    if !ir.datatypes.is_empty() {
        index.push_str("## Datatypes\n\n");
        index.push_str("| name | base | lexical rule |\n|---|---|---|\n");
        for (name, dt) in &ir.datatypes {
            index.push_str(&format!("| {name} | `{}` | {} |\n", dt.base_uri, dt.lexical_check));
        }
        index.push('\n');
    }
    files.insert("index.md".to_string(), index);

    let mut layers = String::new();
    layers.push_str("# Layers\n\n");
    layers.push_str(&format!("- `{}` (version {})\n", ir.id, ir.version));
    match &ir.layer_of {
        Some(base) => layers.push_str(&format!("  - imports `{base}`\n")),
        None => layers.push_str("\nThis profile has no base layer.\n"),
    }
    files.insert("layers.md".to_string(), layers);

    for (name, class) in &ir.classes {
        let mut page = String::new();
        page.push_str(&format!("# {name}\n\n"));
        if let Some(desc) = &class.description {
            page.push_str(&format!("{desc}\n\n"));
        }
        page.push_str(&format!("- Class URI: `{}`\n", class.class_uri));
        if class.is_mixin {
            page.push_str("- Mixin class (not instantiable)\n");
        }
        if class.is_abstract {
            page.push_str("- Abstract class (not instantiable)\n");
        }
        for parent in &class.parents {
            page.push_str(&format!("- Parent: [{parent}]({parent}.md)\n"));
        }
        for mixin in &class.mixins {
            page.push_str(&format!("- Mixin: [{mixin}]({mixin}.md)\n"));
        }
        page.push('\n');

        let effective = ir.effective_slots(name).unwrap_or_default();
        if !effective.is_empty() {
            page.push_str("## Slots\n\n");
            page.push_str("| slot | range | cardinality | URI | description |\n");
            page.push_str("|---|---|---|---|---|\n");
            for (slot_name, slot) in effective {
                page.push_str(&format!(
                    "| {slot_name} | {} | {} | `{}` | {} |\n",
                    render_range(&slot.range),
                    render_cardinality(slot.min_cardinality, slot.max_cardinality),
                    slot.slot_uri,
                    slot.description.as_deref().unwrap_or("")
                ));
            }
            page.push('\n');
        }
        files.insert(format!("{name}.md"), page);
    }

    files
}

fn render_range(range: &RangeSpec) -> String {
    match range {
        RangeSpec::Class { name } => format!("[{name}]({name}.md)"),
        RangeSpec::Datatype { name } => format!("`{name}`"),
        RangeSpec::Union { members } => members
            .iter()
            .map(|m| format!("[{m}]({m}.md)"))
            .collect::<Vec<_>>()
            .join(" or "),
    }
}

fn render_cardinality(min: u32, max: MaxCard) -> String {
    format!("{min}..{max}")
}
