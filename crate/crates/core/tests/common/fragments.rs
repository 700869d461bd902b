//! Random HTML-ish fragments and the patterns clean text must not match.

use std::sync::LazyLock;

use proptest::prelude::*;
use regex::Regex;

pub static TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[A-Za-z/!?][^<>]*>").unwrap());
pub static ENTITY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"&(#[0-9]+|#[xX][0-9a-fA-F]+|[A-Za-z][A-Za-z0-9]*);").unwrap());

pub fn fragment_piece() -> impl Strategy<Value = String> {
    let tag_name = prop::sample::select(vec!["p", "b", "div", "font", "td", "tr", "table", "br", "span", "html", "x-y", "A", "script", "style"]);
    prop_oneof![
        "[a-z]{1,8}".prop_map(|w| format!("{w} ")),
        "[<>&#;/!?a-zA-Z0-9 =\"']{1,6}",
        tag_name.clone().prop_map(|t| format!("<{t}>")),
        tag_name.clone().prop_map(|t| format!("</{t}>")),
        (tag_name, "[a-z]{1,5}", "[a-z0-9 >]{0,6}").prop_map(|(t, a, v)| format!("<{t} {a}=\"{v}\">")),
        prop::sample::select(vec![
            "&amp;", "&nbsp;", "&lt;", "&gt;", "&quot;", "&copy;", "&mdash;", "&bogus;", "&#60;", "&#x3C;", "&#8217;",
            "&#0;", "&#xD800;", "&#99999999;", "&#x110000;", "&nGt;", "&amp;lt;", "&amp;amp;gt;", "&lt;b&gt;", "&amp", "&#38;#60;",
            "&#x26;nbsp;", "<!-- note -->", "<!--", "-->", "<![CDATA[x]]>", "<!DOCTYPE html>", "<?xml version=\"1.0\"?>",
            "<br/>", "<", ">", "&", "&lt;!--", "<script>var a = '<b>';</script>", "<style>p{}</style>",
            "<table><tr><td>1,234</td><td>5,678</td></tr></table>", "<table><tr><td>Name</td><td>Title</td></tr></table>",
        ])
        .prop_map(String::from),
    ]
}

pub fn fragment() -> impl Strategy<Value = String> {
    prop::collection::vec(fragment_piece(), 0..40).prop_map(|v| v.concat())
}
