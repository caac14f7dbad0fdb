import init, { walk_heatmap, edge_sweep, noisy_similarity } from "./pkg/dtqw_web.js";

const $ = (id) => document.getElementById(id);

function shade(v) {
  const c = (full) => Math.round(255 - v * (255 - full));
  return `rgb(${c(8)},${c(48)},${c(107)})`;
}

function drawHeatmap() {
  const steps = Number($("hm-steps").value);
  const data = JSON.parse(walk_heatmap(Number($("hm-minus").value), Number($("hm-plus").value), steps, $("hm-init").value));
  const cv = $("hm-canvas");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const cols = data.rows[0].length;
  const w = (cv.width - 40) / cols;
  const h = (cv.height - 20) / data.rows.length;
  const max = Math.max(...data.rows.flat());
  data.rows.forEach((row, t) => {
    row.forEach((p, k) => {
      ctx.fillStyle = shade(p / max);
      ctx.fillRect(40 + k * w, 20 + t * h, Math.ceil(w), Math.ceil(h));
    });
  });
  ctx.fillStyle = "#1b1f24";
  ctx.font = "11px monospace";
  const origin = 40 + (0 - data.lo + 0.5) * w;
  ctx.fillText("x=0", origin - 10, 12);
  ctx.fillText("t=0", 4, 20 + h / 2 + 4);
  ctx.fillText(`t=${steps}`, 4, 20 + (steps + 0.5) * h + 4);
  const last = data.p_edge[data.p_edge.length - 1];
  const d = data.diffusion[data.diffusion.length - 1];
  $("hm-info").textContent = `after ${steps} steps: weight on x ∈ {−1, 0} = ${last.toFixed(4)}, D(t) = ${d.toFixed(3)}`;
}

function drawCurves(cv, xs, series, yMax = 1) {
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const pad = 36;
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (cv.width - 2 * pad);
  const py = (y) => cv.height - pad - (y / yMax) * (cv.height - 2 * pad);
  ctx.strokeStyle = "#d0d7de";
  ctx.strokeRect(pad, pad, cv.width - 2 * pad, cv.height - 2 * pad);
  ctx.fillStyle = "#57606a";
  ctx.font = "11px monospace";
  ctx.fillText(x0.toFixed(2), pad, cv.height - pad + 14);
  ctx.fillText(x1.toFixed(2), cv.width - pad - 28, cv.height - pad + 14);
  ctx.fillText(yMax.toFixed(1), 4, pad + 4);
  ctx.fillText("0", 4, cv.height - pad + 4);
  for (const { ys, color } of series) {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    ys.forEach((y, i) => (i ? ctx.lineTo(px(xs[i]), py(y)) : ctx.moveTo(px(xs[i]), py(y))));
    ctx.stroke();
    ctx.fillStyle = color;
    ys.forEach((y, i) => ctx.fillRect(px(xs[i]) - 2, py(y) - 2, 4, 4));
  }
}

function drawSweep() {
  const data = JSON.parse(edge_sweep($("sw-mode").value, Number($("sw-steps").value), 60));
  drawCurves($("sw-canvas"), data.theta, [{ ys: data.p_edge, color: "#0969da" }]);
}

function drawNoise() {
  const t1 = 10 ** Number($("nz-t1").value);
  const data = JSON.parse(noisy_similarity(t1, Number($("nz-steps").value), "phi_co"));
  const xs = data.similarity.map((_, t) => t);
  drawCurves($("nz-canvas"), xs, [
    { ys: data.similarity, color: "#0969da" },
    { ys: data.loss, color: "#d1602a" },
  ]);
}

function bind(ids, draw, labels = {}) {
  const run = () => {
    for (const id of ids) {
      const out = $(`${id}-v`);
      if (out) out.textContent = labels[id] ? labels[id]($(id).value) : $(id).value;
    }
    try {
      draw();
      $("error").textContent = "";
    } catch (e) {
      $("error").textContent = e.message ?? String(e);
    }
  };
  ids.forEach((id) => $(id).addEventListener("input", run));
  run();
}

await init();
bind(["hm-minus", "hm-plus", "hm-steps", "hm-init"], drawHeatmap);
bind(["sw-mode", "sw-steps"], drawSweep);
bind(["nz-t1", "nz-steps"], drawNoise, { "nz-t1": (v) => (10 ** Number(v)).toFixed(2) });
