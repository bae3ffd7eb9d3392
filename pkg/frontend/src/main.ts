import { ServiceClient } from "./api.js";
import { SessionController } from "./controller.js";
import type { ControllerState } from "./controller.js";
import { caption } from "./cards.js";
import { renderCard } from "./render.js";
import { fitViewport } from "./viewport.js";

const GRID = 12;
const CARD_WIDTH = 252;
const CARD_HEIGHT = 136;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function setup(): void {
  const base = `${location.protocol}//${location.host}`;
  const client = new ServiceClient(base);
  const controller = new SessionController(client, render);

  const root = document.getElementById("app")!;
  const bar = el("div", "bar");
  const mapPick = el("select") as HTMLSelectElement;
  const newButton = el("button", "", "New session");
  const stepButton = el("button", "", "Step");
  const noveltyButton = el("button", "", "Novelty");
  const optimizeButton = el("button", "", "Optimize");
  const cancelButton = el("button", "", "Cancel");
  const restartButton = el("button", "", "Restart");
  const publishButton = el("button", "", "Publish");
  const status = el("span", "status");
  bar.append(
    mapPick,
    newButton,
    stepButton,
    noveltyButton,
    optimizeButton,
    cancelButton,
    restartButton,
    publishButton,
    status,
  );
  const note = el("div", "note");
  const grid = el("div", "grid");
  root.append(bar, note, grid);

  const cards: {
    wrap: HTMLDivElement;
    canvas: HTMLCanvasElement;
    label: HTMLDivElement;
  }[] = [];
  for (let i = 0; i < GRID; i += 1) {
    const wrap = el("div", "card");
    const canvas = el("canvas") as HTMLCanvasElement;
    canvas.width = CARD_WIDTH;
    canvas.height = CARD_HEIGHT;
    const label = el("div", "label");
    wrap.append(canvas, label);
    grid.append(wrap);
    cards.push({ wrap, canvas, label });
  }

  client
    .maps()
    .then((names) => {
      for (const name of names) {
        const option = el("option", "", name) as HTMLOptionElement;
        option.value = name;
        mapPick.append(option);
      }
    })
    .catch(() => {
      note.textContent = "could not list maps";
    });

  newButton.onclick = () => {
    void controller.create(
      mapPick.value ? { map: mapPick.value } : {},
    );
  };
  stepButton.onclick = () => void controller.run("step");
  noveltyButton.onclick = () => void controller.run("novelty");
  optimizeButton.onclick = () => void controller.run("optimize");
  cancelButton.onclick = () => void controller.cancel();
  restartButton.onclick = () => void controller.restart();
  publishButton.onclick = () => {
    void controller.publish().then((record) => {
      if (record) {
        note.textContent = `published ${record.record_id}`;
      }
    });
  };

  function render(state: ControllerState): void {
    const payload = state.payload;
    const busy = state.busy !== null;
    const hasSelection = state.selection.length > 0;
    stepButton.disabled = busy || !hasSelection;
    noveltyButton.disabled = busy || !hasSelection;
    optimizeButton.disabled = busy || !hasSelection;
    cancelButton.disabled = !controller.canCancel();
    restartButton.disabled = busy || state.sessionId === null;
    publishButton.disabled = busy || state.sessionId === null;
    newButton.disabled = busy;

    if (payload) {
      const evals = state.progress ?? payload.evals;
      status.textContent =
        `${payload.map}  ${payload.status}  ` +
        `${evals} / ${payload.budget} evaluations`;
    } else {
      status.textContent = "no session";
    }
    note.textContent = state.message ?? note.textContent;
    if (!state.message && !state.record) {
      note.textContent = "";
    }

    const viewport = state.geometry
      ? fitViewport(state.geometry.bounds, CARD_WIDTH, CARD_HEIGHT)
      : null;
    for (let i = 0; i < GRID; i += 1) {
      const slot = cards[i]!;
      const candidate = payload?.candidates[i];
      if (!candidate || !state.geometry || !viewport) {
        slot.wrap.className = "card empty";
        slot.label.textContent = "";
        continue;
      }
      const selected = state.selection.includes(candidate.id);
      slot.wrap.className =
        "card" +
        (selected ? " selected" : "") +
        (candidate.solved ? " solved" : "");
      slot.label.textContent = `#${candidate.id}  ${caption(candidate)}`;
      const ctx = slot.canvas.getContext("2d")!;
      ctx.clearRect(0, 0, CARD_WIDTH, CARD_HEIGHT);
      renderCard(ctx, state.geometry, candidate.trail, viewport);
      slot.wrap.onclick = () => controller.toggle(candidate.id);
    }
  }

  render(controller.state);
}

setup();
