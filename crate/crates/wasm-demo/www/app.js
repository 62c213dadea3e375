import init, { MapView } from "./pkg/quadmix_wasm.js";

const $ = (id) => document.getElementById(id);
let view = null;
let layout = null;
let highlight = null;

function fail(e) {
  $("error").textContent = String(e);
}

// Spring layout seeded from the seed field so redraws are stable.
function springLayout(n, edges, seed) {
  let s = seed >>> 0 || 1;
  const rand = () => ((s = (s * 1664525 + 1013904223) >>> 0) / 4294967296);
  const pos = Array.from({ length: n }, () => [rand(), rand()]);
  const k = 1 / Math.sqrt(n);
  for (let it = 0, t = 0.1; it < 300; it++, t *= 0.985) {
    const disp = pos.map(() => [0, 0]);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
        const d2 = dx * dx + dy * dy + 1e-9, f = (k * k) / d2;
        disp[i][0] += dx * f; disp[i][1] += dy * f;
        disp[j][0] -= dx * f; disp[j][1] -= dy * f;
      }
    }
    for (let e = 0; e < edges.length; e += 2) {
      const a = edges[e], b = edges[e + 1];
      if (a === b) continue;
      const dx = pos[a][0] - pos[b][0], dy = pos[a][1] - pos[b][1];
      const d = Math.hypot(dx, dy) + 1e-9, f = d / k;
      disp[a][0] -= dx * f; disp[a][1] -= dy * f;
      disp[b][0] += dx * f; disp[b][1] += dy * f;
    }
    for (let i = 0; i < n; i++) {
      const len = Math.hypot(disp[i][0], disp[i][1]) + 1e-9, step = Math.min(len, t);
      pos[i][0] += (disp[i][0] / len) * step;
      pos[i][1] += (disp[i][1] / len) * step;
    }
  }
  const xs = pos.map((p) => p[0]), ys = pos.map((p) => p[1]);
  const [x0, x1, y0, y1] = [Math.min(...xs), Math.max(...xs), Math.min(...ys), Math.max(...ys)];
  return pos.map(([x, y]) => [(x - x0) / (x1 - x0 || 1), (y - y0) / (y1 - y0 || 1)]);
}

function drawMap() {
  const c = $("map"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  if (!view) return;
  const pad = 20, w = c.width - 2 * pad, h = c.height - 2 * pad;
  const at = (v) => [pad + layout[v][0] * w, pad + layout[v][1] * h];
  const edges = view.edges();
  if (highlight && highlight.on_faces()) {
    const corners = view.face_corners();
    g.fillStyle = "rgba(40, 120, 220, 0.25)";
    for (const f of highlight.witness()) {
      g.beginPath();
      for (let i = 0; i < 4; i++) g[i ? "lineTo" : "moveTo"](...at(corners[4 * f + i]));
      g.closePath();
      g.fill();
    }
  }
  const cut = new Set(highlight ? highlight.cut_edges() : []);
  for (let e = 0; e < edges.length / 2; e++) {
    g.strokeStyle = cut.has(e) ? "#d22" : "#555";
    g.lineWidth = cut.has(e) ? 2.5 : 1;
    g.beginPath();
    g.moveTo(...at(edges[2 * e]));
    g.lineTo(...at(edges[2 * e + 1]));
    g.stroke();
  }
  const inside = new Set(highlight && !highlight.on_faces() ? highlight.witness() : []);
  for (let v = 0; v < layout.length; v++) {
    g.fillStyle = v === view.root_vertex() ? "#e90" : inside.has(v) ? "#28c" : "#222";
    g.beginPath();
    g.arc(...at(v), 3.5, 0, 2 * Math.PI);
    g.fill();
  }
}

function drawCurve(curve, eps) {
  const c = $("curve"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const steps = curve.length / 2 - 1, pad = 36;
  const w = c.width - 2 * pad, h = c.height - 2 * pad;
  // log10 scale from 1e-3 to the initial uniform deviation
  const top = Math.log10(Math.max(curve[0], 10)), bottom = -3;
  const y = (v) => pad + h * (top - Math.log10(Math.max(v, 1e-3))) / (top - bottom);
  const x = (s) => pad + (w * s) / Math.max(steps, 1);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, w, h);
  g.fillStyle = "#333";
  g.fillText(`steps 0..${steps}`, pad, c.height - 10);
  g.fillText("log deviation", 4, 16);
  g.setLineDash([4, 4]);
  g.beginPath(); g.moveTo(pad, y(eps)); g.lineTo(pad + w, y(eps)); g.stroke();
  g.setLineDash([]);
  for (const [offset, color, name] of [[0, "#c22", "uniform"], [1, "#27c", "total variation"]]) {
    g.strokeStyle = color;
    g.beginPath();
    for (let s = 0; s <= steps; s++) g[s ? "lineTo" : "moveTo"](x(s), y(curve[2 * s + offset]));
    g.stroke();
    g.fillStyle = color;
    g.fillText(name, pad + w - 100, pad + 14 + 14 * offset);
  }
}

function sample() {
  fail("");
  try {
    const faces = Number($("faces").value), seed = Number($("seed").value);
    view = new MapView(faces, seed);
    layout = springLayout(view.vertices(), view.edges(), seed);
    highlight = null;
    $("info").textContent =
      `vertices ${view.vertices()}\nfaces    ${view.faces()}\nmax deg  ${view.max_degree()}\nhash     ${view.hash()}`;
    $("mixinfo").textContent = "";
    $("cutinfo").textContent = "";
    drawMap();
    drawCurve([1, 1], 0.5);
  } catch (e) {
    fail(e);
  }
}

function mix() {
  fail("");
  if (!view) return fail("sample a map first");
  try {
    const chain = $("chain").value, eps = Number($("eps").value);
    const [tu, ttv, trel, l2] = view.mixing(chain, eps);
    $("mixinfo").textContent =
      `τ uniform ${tu}\nτ tv      ${ttv}\nτ rel     ${trel.toFixed(3)}\nλ₂        ${l2.toFixed(5)}`;
    drawCurve(view.deviation_curve(chain, Math.min(Math.ceil(1.5 * tu) + 1, 2000)), eps);
  } catch (e) {
    fail(e);
  }
}

function cut() {
  fail("");
  if (!view) return fail("sample a map first");
  try {
    highlight = view.bottleneck($("objective").value);
    $("cutinfo").textContent =
      `${highlight.exact() ? "exact" : "heuristic"}\nvalue ${highlight.value().toPrecision(6)}\n` +
      `|witness| ${highlight.witness().length} ${highlight.on_faces() ? "faces" : "vertices"}\n` +
      `cut edges ${highlight.cut_edges().length}`;
    drawMap();
  } catch (e) {
    fail(e);
  }
}

await init();
$("sample").onclick = sample;
$("mix").onclick = mix;
$("cut").onclick = cut;
sample();
