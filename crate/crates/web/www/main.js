import init, { curves, granulate, simulate } from "./pkg/mereoml_web.js";

const WORLD = `# Two-obstacle corridor for the five-robot cross.
# Units are metres; robots are 0.24 m safety squares spaced 0.25 m apart
# on a 0.05 m grid.
bounds 0 0 6 2
cell 0.05
goal 5.2 0.2 5.9 1.8

obstacle 2.0 0.0 2.5 1.1
obstacle 4.0 0.9 4.5 2.0

# centre, west, east, north, south
robot 0 0.605 0.855 0.845 1.095
robot 1 0.355 0.855 0.595 1.095
robot 2 0.855 0.855 1.095 1.095
robot 3 0.605 1.105 0.845 1.345
robot 4 0.605 0.605 0.845 0.845
`;

const FORMATION = `(cross
  (set
    (max-dist 0.25 roomba 0 (between roomba 0 roomba 1 roomba 2))
    (max-dist 0.25 roomba 0 (between roomba 0 roomba 3 roomba 4))
    (not-between roomba 3 roomba 1 roomba 2)
    (not-between roomba 4 roomba 1 roomba 2)
    (not-between roomba 1 roomba 3 roomba 4)
    (not-between roomba 2 roomba 3 roomba 4)))
`;

const $ = (id) => document.getElementById(id);

function drawCurves() {
  const s = parseFloat($("s").value);
  $("s-val").textContent = s.toFixed(2);
  const pts = JSON.parse(curves(s, 200));
  const c = $("curves");
  const g = c.getContext("2d");
  const pad = 30, w = c.width - 2 * pad, h = c.height - 2 * pad;
  const X = (r) => pad + r * w;
  const Y = (v) => pad + (1 - v) * h;
  g.clearRect(0, 0, c.width, c.height);
  g.strokeStyle = "#ccc";
  g.strokeRect(pad, pad, w, h);
  g.fillStyle = "#555";
  g.fillText("0", pad - 12, Y(0) + 4);
  g.fillText("1", pad - 12, Y(1) + 4);
  g.fillText("r", X(1) - 4, Y(0) + 16);
  const line = (color, f) => {
    g.strokeStyle = color;
    g.beginPath();
    pts.forEach((p, i) => (i ? g.lineTo : g.moveTo).call(g, X(p.r), Y(f(p))));
    g.stroke();
  };
  line("#999", (p) => Math.min(p.r, s));
  line("#1f5fbf", (p) => p.lukasiewicz);
  line("#c0392b", (p) => p.exponential);
}

function runGranulate() {
  const r = parseFloat($("radius").value);
  $("radius-val").textContent = r.toFixed(2);
  try {
    const out = JSON.parse(granulate($("table").value, $("decision").value.trim(), r, parseInt($("folds").value) || 0, 7));
    const acc = out.accuracy === null ? "" : `, cross-validated accuracy ${out.accuracy.toFixed(3)}`;
    $("gran-summary").textContent = `${out.granules.length} granules cover ${out.objects} objects${acc}`;
    $("gran-summary").className = "";
    $("gran-out").textContent =
      out.granules.map((g) => `g(${g.center}) = {${g.members.join(", ")}}`).join("\n") + "\n\n" + out.reflection_csv;
  } catch (e) {
    $("gran-summary").textContent = String(e);
    $("gran-summary").className = "err";
    $("gran-out").textContent = "";
  }
}

const COLORS = ["#1f5fbf", "#c0392b", "#27ae60", "#8e44ad", "#d35400", "#16a085"];
let timer = null;

function runSim() {
  clearInterval(timer);
  let sim;
  try {
    sim = JSON.parse(simulate($("world").value, $("formation").value, parseInt($("steps").value) || 1000));
  } catch (e) {
    $("sim-status").textContent = String(e);
    $("sim-status").className = "err";
    return;
  }
  const c = $("field");
  const g = c.getContext("2d");
  const [bx1, by1, bx2, by2] = sim.bounds;
  const k = Math.min(c.width / (bx2 - bx1), c.height / (by2 - by1));
  const box = (r, fill) => {
    g.fillStyle = fill;
    g.fillRect((r[0] - bx1) * k, c.height - (r[3] - by1) * k, (r[2] - r[0]) * k, (r[3] - r[1]) * k);
  };
  let i = 0;
  const frame = () => {
    g.clearRect(0, 0, c.width, c.height);
    box(sim.goal, "#cdeccd");
    sim.obstacles.forEach((o) => box(o, "#888"));
    for (let j = 0; j <= i; j += Math.max(1, Math.floor(i / 60))) {
      sim.frames[j].rects.forEach((r) => box(r.slice(1), "rgba(0,0,0,0.04)"));
    }
    sim.frames[i].rects.forEach((r) => box(r.slice(1), COLORS[r[0] % COLORS.length]));
    $("sim-status").className = "";
    $("sim-status").textContent = `step ${i} / ${sim.frames.length - 1}, violations ${sim.frames[i].violations}, ${sim.status}`;
    if (++i >= sim.frames.length) clearInterval(timer);
  };
  frame();
  timer = setInterval(frame, 40);
}

await init();
$("status").textContent = "";
$("world").value = WORLD;
$("formation").value = FORMATION;
$("s").addEventListener("input", drawCurves);
for (const id of ["radius", "table", "decision", "folds"]) $(id).addEventListener("input", runGranulate);
$("run").addEventListener("click", runSim);
drawCurves();
runGranulate();
