import init, { solve_trace, compare_methods, k_max_curve } from "./pkg/inexact_krylov_demo.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

function form(id) {
  const out = {};
  for (const el of document.querySelectorAll(`#${id} [name]`)) out[el.name] = el.value;
  return out;
}

function showError(e) {
  document.getElementById("error").textContent = e ? String(e.message ?? e) : "";
}

function prepare(canvas) {
  const ratio = window.devicePixelRatio || 1;
  const w = canvas.clientWidth, h = canvas.clientHeight;
  canvas.width = w * ratio;
  canvas.height = h * ratio;
  const ctx = canvas.getContext("2d");
  ctx.setTransform(ratio, 0, 0, ratio, 0, 0);
  ctx.clearRect(0, 0, w, h);
  ctx.font = "11px system-ui, sans-serif";
  return { ctx, w, h };
}

// Line plot with a log10 y axis. series: [{ label, color, points: [[x, y]] }]
function logPlot(canvas, series, xlabel) {
  const { ctx, w, h } = prepare(canvas);
  const pad = { l: 52, r: 12, t: 10, b: 30 };
  const pts = series.flatMap(s => s.points).filter(([, y]) => y > 0 && isFinite(y));
  if (pts.length === 0) return;
  const xmax = Math.max(...pts.map(p => p[0]));
  let ylo = Math.floor(Math.log10(Math.min(...pts.map(p => p[1]))));
  let yhi = Math.ceil(Math.log10(Math.max(...pts.map(p => p[1]))));
  if (ylo === yhi) { ylo -= 1; yhi += 1; }
  const X = x => pad.l + (x / xmax) * (w - pad.l - pad.r);
  const Y = y => pad.t + (yhi - Math.log10(y)) / (yhi - ylo) * (h - pad.t - pad.b);

  ctx.strokeStyle = "#eee";
  ctx.fillStyle = "#555";
  const step = Math.max(1, Math.ceil((yhi - ylo) / 8));
  for (let e = ylo; e <= yhi; e += step) {
    const y = Y(10 ** e);
    ctx.beginPath(); ctx.moveTo(pad.l, y); ctx.lineTo(w - pad.r, y); ctx.stroke();
    ctx.fillText(`1e${e}`, 4, y + 4);
  }
  ctx.fillText("0", X(0) - 3, h - pad.b + 14);
  ctx.fillText(String(xmax), X(xmax) - 12, h - pad.b + 14);
  ctx.fillText(xlabel, (w - pad.l) / 2, h - 4);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let started = false;
    for (const [x, y] of s.points) {
      if (!(y > 0 && isFinite(y))) continue;
      if (started) ctx.lineTo(X(x), Y(y)); else ctx.moveTo(X(x), Y(y));
      started = true;
    }
    ctx.stroke();
  }
}

function legend(id, series) {
  document.getElementById(id).innerHTML = series
    .map(s => `<span style="color:${s.color}">━ ${s.label}</span>`)
    .join("");
}

function fmt(x) {
  return typeof x === "number" ? (Number.isInteger(x) ? String(x) : x.toExponential(2)) : String(x);
}

function runTrace() {
  const f = form("trace-form");
  const t = JSON.parse(solve_trace(+f.n, +f.kappa, +f.eps, f.method, f.mode, f.oracle, +f.seed));
  const it = t.iterations;
  const series = [
    { label: "‖x_k − x*‖_A", color: COLORS[0], points: it.map(i => [i.k, i.error_energy]) },
    { label: "‖r_k‖₂ (recurred)", color: COLORS[1], points: it.map(i => [i.k, i.r_2norm]) },
  ];
  if (t.oracle !== "exact") {
    series.push({ label: "ω granted", color: COLORS[2], points: it.map(i => [i.k, i.omega_hat]) });
    series.push({ label: "cost of product", color: COLORS[3], points: it.map(i => [i.k, i.cost]) });
  }
  logPlot(document.getElementById("trace-plot"), series, "iteration k");
  legend("trace-legend", series);
  document.getElementById("trace-summary").textContent =
    `${t.method} on ${t.problem} (${t.mode}, ${t.oracle} oracle)\n` +
    `n_it ${t.n_it}   cost ${fmt(t.total_cost)}   termination ${t.termination}   k_max ${t.k_max}` +
    (t.oracle === "exact" ? "" : `   Σ1/φ̂ ${t.budget_spent.toFixed(3)}`) + "\n" +
    `r.res.gap ${fmt(t.r_res_gap)}   r.sol.err ${fmt(t.r_sol_err)}   r.val.err ${fmt(t.r_val_err)}`;
}

function runCompare() {
  const f = form("compare-form");
  const rows = JSON.parse(compare_methods(+f.n, +f.kappa, +f.eps, f.oracle, +f.seed));
  const { ctx, w, h } = prepare(document.getElementById("compare-plot"));
  const max = Math.max(...rows.map(r => r.cost));
  const bw = (w - 80) / rows.length;
  rows.forEach((r, i) => {
    const bh = (r.cost / max) * (h - 40);
    ctx.fillStyle = COLORS[i % COLORS.length];
    ctx.fillRect(40 + i * bw + 8, h - 20 - bh, bw - 16, bh);
    ctx.fillStyle = "#333";
    ctx.fillText(r.method, 40 + i * bw + bw / 2 - 10, h - 6);
    ctx.fillText(r.cost.toFixed(1), 40 + i * bw + bw / 2 - 10, h - 24 - bh);
  });
  const head = ["method", "n_it", "cost", "r.res.gap", "r.sol.err", "r.val.err", "termination"];
  const body = rows.map(r =>
    `<tr><td>${r.method}</td><td>${r.n_it}</td><td>${fmt(r.cost)}</td><td>${fmt(r.r_res_gap)}</td>` +
    `<td>${fmt(r.r_sol_err)}</td><td>${fmt(r.r_val_err)}</td><td>${r.termination}</td></tr>`).join("");
  document.getElementById("compare-table").innerHTML =
    `<table><tr>${head.map(c => `<th>${c}</th>`).join("")}</tr>${body}</table>`;
}

function runKmax() {
  const f = form("kmax-form");
  const pts = JSON.parse(k_max_curve(+f.eps, +f.lo, +f.hi, 200));
  const { ctx, w, h } = prepare(document.getElementById("kmax-plot"));
  const pad = { l: 52, r: 12, t: 10, b: 30 };
  const lx = pts.map(p => Math.log10(p.kappa));
  const ly = pts.map(p => Math.log10(p.k_max));
  const [x0, x1] = [Math.min(...lx), Math.max(...lx)];
  const [y0, y1] = [Math.floor(Math.min(...ly)), Math.ceil(Math.max(...ly)) || 1];
  const X = x => pad.l + (x - x0) / (x1 - x0 || 1) * (w - pad.l - pad.r);
  const Y = y => pad.t + (y1 - y) / (y1 - y0 || 1) * (h - pad.t - pad.b);
  ctx.fillStyle = "#555";
  for (let e = y0; e <= y1; e++) ctx.fillText(`1e${e}`, 4, Y(e) + 4);
  for (let e = Math.ceil(x0); e <= Math.floor(x1); e++) ctx.fillText(`κ=1e${e}`, X(e) - 14, h - 8);
  ctx.strokeStyle = COLORS[0];
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  pts.forEach((p, i) => (i ? ctx.lineTo(X(lx[i]), Y(ly[i])) : ctx.moveTo(X(lx[i]), Y(ly[i]))));
  ctx.stroke();
}

function guarded(fn) {
  return () => {
    showError(null);
    try { fn(); } catch (e) { showError(e); }
  };
}

await init();
for (const [id, fn] of [["trace-run", runTrace], ["compare-run", runCompare], ["kmax-run", runKmax]]) {
  document.getElementById(id).addEventListener("click", e => { e.preventDefault(); guarded(fn)(); });
}
guarded(runTrace)();
guarded(runCompare)();
guarded(runKmax)();
