import init, { validate, analyze, similarity } from "./pkg/caption_audit_web.js";

const $ = (id) => document.getElementById(id);

function el(tag, attrs = {}, ...children) {
  const node = document.createElement(tag);
  Object.assign(node, attrs);
  node.append(...children);
  return node;
}

function show(target, ...nodes) {
  $(target).replaceChildren(...nodes);
}

function call(fn, ...args) {
  const result = JSON.parse(fn(...args));
  if (result && result.error) throw new Error(result.error);
  return result;
}

function guarded(target, render) {
  return () => {
    try {
      render();
    } catch (e) {
      show(target, el("p", { className: "err", textContent: e.message }));
    }
  };
}

function list(items) {
  return items.length ? items.join(", ") : "none";
}

const runValidate = guarded("validate-out", () => {
  const tau = parseFloat($("tau").value);
  const v = call(validate, $("caption").value, $("labels").value, tau, $("similar").value.trim());
  const c = v.comparison;
  const rows = [
    ["caption terms", list(c.s_nouns)],
    ["detected terms", list(c.s_names)],
    ["confirmed", list(c.s_inter)],
    ["caption only", list(c.s_caption)],
    ["image only", list(c.s_image)],
    ["unmapped nouns", list(c.unmapped_nouns)],
  ].map(([k, val]) => el("tr", {}, el("th", { textContent: k }), el("td", { textContent: val })));
  const corrections = Object.entries(v.corrections).map(([f, r]) => `${f} → ${r}`);
  show(
    "validate-out",
    el("div", {
      className: "verdict " + (v.is_foil ? "foil" : "correct"),
      textContent: v.is_foil ? `Foil: ${corrections.join(", ")}` : "Correct",
    }),
    el("p", { textContent: v.explanation }),
    el("table", {}, ...rows),
  );
});

const runAnalyze = guarded("analyze-out", () => {
  const a = call(analyze, $("analyze-caption").value, parseFloat($("tau").value));
  const nounWords = new Set(a.nouns.map((n) => n.noun));
  const chips = el(
    "p",
    { className: "chips" },
    ...a.tokens.map((t) =>
      el("span", {
        className: t.tag.startsWith("NN") ? "noun" : "",
        textContent: `${t.word}/${t.tag}`,
      }),
    ),
  );
  const rows = a.nouns.map((n) => {
    const how = n.term === null ? "no category" : typeof n.match === "string" ? n.match : `similarity ${n.match.similarity.toFixed(3)}`;
    return el(
      "tr",
      {},
      el("td", { textContent: n.noun }),
      el("td", { textContent: n.term ?? "—" }),
      el("td", { textContent: n.supercategory ?? "" }),
      el("td", { textContent: how }),
    );
  });
  const head = el("tr", {}, ...["noun", "category", "supercategory", "matched by"].map((h) => el("th", { textContent: h })));
  show("analyze-out", chips, nounWords.size ? el("table", {}, head, ...rows) : el("p", { textContent: "No nouns found." }));
});

const runSimilarity = guarded("sim-out", () => {
  const s = call(similarity, $("sim-a").value, $("sim-b").value);
  if (s.similarity === null) {
    show("sim-out", el("p", { textContent: "No path between these synsets." }));
    return;
  }
  show(
    "sim-out",
    el("p", { textContent: `similarity ${s.similarity.toFixed(4)} (path length ${s.distance})` }),
    el("div", { className: "path", textContent: s.path.join(" → ") }),
  );
});

await init();
$("run-validate").addEventListener("click", runValidate);
$("run-analyze").addEventListener("click", runAnalyze);
$("run-sim").addEventListener("click", runSimilarity);
for (const [input, action] of [["caption", runValidate], ["labels", runValidate], ["analyze-caption", runAnalyze], ["sim-a", runSimilarity], ["sim-b", runSimilarity]]) {
  $(input).addEventListener("keydown", (e) => e.key === "Enter" && action());
}
runValidate();
runAnalyze();
runSimilarity();
