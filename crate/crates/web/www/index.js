import init, { solve_field, project_datum, rank_sweep } from './pkg/ifred_web.js';

const $ = (id) => document.getElementById(id);
const BASES = { line: ['adapted', 'poly'], curved: ['fourier'] };
const RESOLUTIONS = { line: [16, 32, 64, 128], curved: [64, 128, 256] };

function family() {
  return $('case').value.startsWith('line') ? 'line' : 'curved';
}

function fillSelect(sel, items, keep) {
  sel.innerHTML = '';
  for (const v of items) {
    const o = document.createElement('option');
    o.value = o.textContent = v;
    sel.appendChild(o);
  }
  if (items.map(String).includes(keep)) sel.value = keep;
}

function refreshChoices() {
  const f = family();
  fillSelect($('basis'), BASES[f], $('basis').value);
  fillSelect($('resolution'), RESOLUTIONS[f], $('resolution').value);
  if (!RESOLUTIONS[f].map(String).includes($('resolution').value)) $('resolution').value = String(RESOLUTIONS[f][0]);
}

function args() {
  return [$('case').value, $('basis').value, Number($('resolution').value), Number($('m').value)];
}

function color(t) {
  // blue to white to red on t in [-1, 1]
  const s = Math.max(-1, Math.min(1, t));
  const a = Math.round(255 * (1 - Math.abs(s)));
  return s >= 0 ? `rgb(255,${a},${a})` : `rgb(${a},${a},255)`;
}

function drawField(view, which) {
  const cv = $('field');
  const ctx = cv.getContext('2d');
  ctx.clearRect(0, 0, cv.width, cv.height);
  let [x0, y0, x1, y1] = [Infinity, Infinity, -Infinity, -Infinity];
  for (const [x, y] of view.vertices) {
    x0 = Math.min(x0, x); x1 = Math.max(x1, x);
    y0 = Math.min(y0, y); y1 = Math.max(y1, y);
  }
  const pad = 10;
  const scale = (cv.width - 2 * pad) / Math.max(x1 - x0, y1 - y0);
  const px = ([x, y]) => [pad + (x - x0) * scale, cv.height - pad - (y - y0) * scale];
  const data = view[which];
  const amp = Math.max(1e-300, ...data.flat().map(Math.abs));
  view.triangles.forEach((tri, k) => {
    const mean = (data[k][0] + data[k][1] + data[k][2]) / 3;
    ctx.beginPath();
    tri.forEach((v, i) => {
      const [a, b] = px(view.vertices[v]);
      i === 0 ? ctx.moveTo(a, b) : ctx.lineTo(a, b);
    });
    ctx.closePath();
    ctx.fillStyle = color(mean / amp);
    ctx.fill();
  });
  ctx.strokeStyle = '#000';
  ctx.lineWidth = 2;
  ctx.beginPath();
  view.interface.forEach((p, i) => {
    const [a, b] = px(p);
    i === 0 ? ctx.moveTo(a, b) : ctx.lineTo(a, b);
  });
  ctx.stroke();
  return amp;
}

function axes(cv, xs, series, logY) {
  const ctx = cv.getContext('2d');
  ctx.clearRect(0, 0, cv.width, cv.height);
  const f = logY ? (v) => Math.log10(Math.max(v, 1e-16)) : (v) => v;
  const ys = series.flatMap((s) => s.values.map(f));
  const [xmin, xmax] = [Math.min(...xs), Math.max(...xs)];
  let [ymin, ymax] = [Math.min(...ys), Math.max(...ys)];
  if (ymax - ymin < 1e-12) { ymin -= 1; ymax += 1; }
  const pad = 30;
  const X = (x) => pad + (x - xmin) / (xmax - xmin || 1) * (cv.width - 2 * pad);
  const Y = (y) => cv.height - pad - (f(y) - ymin) / (ymax - ymin) * (cv.height - 2 * pad);
  ctx.strokeStyle = '#888';
  ctx.strokeRect(pad, pad, cv.width - 2 * pad, cv.height - 2 * pad);
  ctx.fillStyle = '#333';
  ctx.font = '11px sans-serif';
  ctx.fillText(logY ? `1e${ymax.toFixed(0)}` : ymax.toPrecision(3), 2, pad);
  ctx.fillText(logY ? `1e${ymin.toFixed(0)}` : ymin.toPrecision(3), 2, cv.height - pad);
  series.forEach((s, i) => {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.values.forEach((v, j) => (j === 0 ? ctx.moveTo(X(xs[j]), Y(v)) : ctx.lineTo(X(xs[j]), Y(v))));
    ctx.stroke();
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, cv.width - pad - 90, pad + 14 * (i + 1));
  });
}

function update() {
  $('m-label').textContent = $('m').value;
  try {
    const view = JSON.parse(solve_field(...args()));
    const which = document.querySelector('input[name=field]:checked').value;
    const amp = drawField(view, which);
    const proj = JSON.parse(project_datum(...args(), 200));
    axes($('proj'), proj.params, [
      { label: 'g', values: proj.g, color: '#000' },
      { label: 'g_m', values: proj.g_m, color: '#d33' },
    ], false);
    const r = view.record;
    $('status').textContent =
      `vertices=${view.vertices.length} triangles=${view.triangles.length} color scale=${amp.toExponential(3)}\n` +
      `m=${r.m} g_rel_err=${r.g_rel_err.toExponential(3)} eu_rms=${r.eu_rms.toExponential(3)} ` +
      `eq_rms=${r.eq_rms.toExponential(3)} residual=${r.residual.toExponential(3)}`;
  } catch (e) {
    $('status').textContent = `error: ${e}`;
  }
}

function sweep() {
  try {
    const [c, b, n] = args();
    const s = JSON.parse(rank_sweep(c, b, n, 12));
    const ms = s.records.map((r) => r.m);
    axes($('sweep-plot'), ms, [
      { label: 'g_rel_err', values: s.records.map((r) => r.g_rel_err), color: '#000' },
      { label: 'eu_rms', values: s.records.map((r) => r.eu_rms), color: '#27c' },
      { label: 'eq_rms', values: s.records.map((r) => r.eq_rms), color: '#d33' },
    ], true);
  } catch (e) {
    $('status').textContent = `error: ${e}`;
  }
}

await init();
refreshChoices();
$('case').addEventListener('change', () => { refreshChoices(); update(); });
for (const id of ['basis', 'resolution', 'm']) $(id).addEventListener('input', update);
document.querySelectorAll('input[name=field]').forEach((el) => el.addEventListener('change', update));
$('sweep').addEventListener('click', sweep);
update();
