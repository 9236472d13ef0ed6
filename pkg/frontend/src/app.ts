import { ApiError, AuthError, NetworkError, ReviewApiClient } from './api';
import { TaskFlow } from './flow';
import { TaskState } from './ordering';
import { SubmissionQueue, BrowserStorage } from './queue';
import { RANKING_CRITERIA, type TaskKind, type Verdict } from './types';

interface SessionConfig {
  baseUrl: string;
  token: string;
  annotator: string;
  kind: TaskKind;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Entry point: renders the login form, then the annotation loop. */
export function mountApp(root: HTMLElement): void {
  root.textContent = '';
  root.appendChild(renderLogin(root));
}

function renderLogin(root: HTMLElement, message?: string): HTMLElement {
  const panel = el('div', 'login-panel');
  panel.appendChild(el('h1', undefined, 'Rationale review'));
  if (message) panel.appendChild(el('p', 'error-banner', message));

  const fields: Array<[keyof SessionConfig, string, string]> = [
    ['baseUrl', 'Service URL', 'http://127.0.0.1:841'],
    ['token', 'Review token', ''],
    ['annotator', 'Annotator id', ''],
  ];
  const inputs = new Map<string, HTMLInputElement>();
  for (const [name, label, placeholder] of fields) {
    const row = el('label', 'field');
    row.appendChild(el('span', undefined, label));
    const input = el('input');
    input.name = name;
    input.placeholder = placeholder;
    if (name === 'token') input.type = 'password';
    inputs.set(name, input);
    row.appendChild(input);
    panel.appendChild(row);
  }

  const kindRow = el('label', 'field');
  kindRow.appendChild(el('span', undefined, 'Task kind'));
  const kindSelect = el('select');
  for (const kind of ['ranking', 'verification']) {
    const option = el('option', undefined, kind);
    option.value = kind;
    kindSelect.appendChild(option);
  }
  kindRow.appendChild(kindSelect);
  panel.appendChild(kindRow);

  const start = el('button', 'primary', 'Start');
  start.addEventListener('click', () => {
    const config: SessionConfig = {
      baseUrl: (inputs.get('baseUrl')!.value || 'http://127.0.0.1:841').replace(/\/$/, ''),
      token: inputs.get('token')!.value,
      annotator: inputs.get('annotator')!.value.trim(),
      kind: kindSelect.value as TaskKind,
    };
    if (!config.annotator) {
      inputs.get('annotator')!.focus();
      return;
    }
    void startSession(root, config);
  });
  panel.appendChild(start);
  return panel;
}

async function startSession(root: HTMLElement, config: SessionConfig): Promise<void> {
  const client = new ReviewApiClient(config.baseUrl, config.token);
  const storage = typeof window !== 'undefined' && 'localStorage' in window
    ? new BrowserStorage(`medcorpus-queue-${config.annotator}-${config.kind}`)
    : undefined;
  const flow = new TaskFlow(client, config.annotator, config.kind,
    new SubmissionQueue(storage));
  try {
    await flow.advance();
  } catch (error) {
    root.textContent = '';
    root.appendChild(renderLogin(root, describeError(error)));
    return;
  }
  renderFlow(root, flow);
}

function describeError(error: unknown): string {
  if (error instanceof AuthError) return 'Token rejected; check it and retry.';
  if (error instanceof NetworkError) return 'Cannot reach the review service.';
  if (error instanceof ApiError) return error.message;
  return String(error);
}

function renderFlow(root: HTMLElement, flow: TaskFlow, banner?: string): void {
  root.textContent = '';
  const state = flow.current();
  if (state === null) {
    const done = el('div', 'done-screen');
    done.appendChild(el('h1', undefined, 'All done'));
    done.appendChild(el('p', undefined,
      `No more ${flow.kind} tasks for ${flow.annotator}.`));
    if (flow.pendingCount() > 0) {
      done.appendChild(el('p', 'warn',
        `${flow.pendingCount()} submission(s) queued offline.`));
      const retry = el('button', 'primary', 'Retry queued submissions');
      retry.addEventListener('click', () => {
        void flow.flushQueue().then(() => renderFlow(root, flow));
      });
      done.appendChild(retry);
    }
    root.appendChild(done);
    return;
  }

  const task = state.task;
  const card = el('div', 'task-card');
  if (banner) card.appendChild(el('p', 'error-banner', banner));

  const head = el('div', 'task-head');
  head.appendChild(el('span', 'lang-badge', task.lang.toUpperCase()));
  head.appendChild(el('span', 'case-id', task.case_id));
  card.appendChild(head);

  const rubric = el('div', 'rubric');
  rubric.appendChild(el('h2', undefined,
    task.kind === 'ranking' ? 'Rank the responses by:' : 'Judge the rationale for:'));
  const list = el('ul');
  for (const criterion of RANKING_CRITERIA) {
    list.appendChild(el('li', undefined, criterion));
  }
  rubric.appendChild(list);
  card.appendChild(rubric);

  card.appendChild(el('h2', undefined, 'Question'));
  card.appendChild(el('p', 'question', task.question));
  const options = el('ul', 'options');
  for (const [letter, text] of Object.entries(task.options)) {
    const item = el('li', undefined, `${letter}. ${text}`);
    if (task.answers.includes(letter)) item.classList.add('gold');
    options.appendChild(item);
  }
  card.appendChild(options);
  card.appendChild(el('p', 'gold-note', `Correct: ${task.answers.join(', ')}`));

  if (task.reference_rationale) {
    card.appendChild(el('h2', undefined, 'Reference rationale'));
    card.appendChild(el('p', 'reference', task.reference_rationale));
  }

  const submit = el('button', 'primary submit', 'Submit');
  submit.disabled = !state.isComplete();

  if (task.kind === 'ranking') {
    card.appendChild(el('h2', undefined, 'Candidates (best first)'));
    card.appendChild(renderRankingList(state, () => {
      renderFlow(root, flow, banner);
    }));
  } else {
    card.appendChild(el('h2', undefined, 'Verdict'));
    const verdicts = el('div', 'verdicts');
    for (const verdict of ['qualified', 'unqualified'] as Verdict[]) {
      const button = el('button', 'verdict', verdict);
      if (state.verdictDraft() === verdict) button.classList.add('chosen');
      button.addEventListener('click', () => {
        state.setVerdict(verdict);
        renderFlow(root, flow, banner);
      });
      verdicts.appendChild(button);
    }
    card.appendChild(verdicts);
  }

  submit.disabled = !state.isComplete();
  submit.addEventListener('click', () => {
    submit.disabled = true; // double-submit guard
    void flow
      .submitCurrent()
      .then((delivered) => {
        renderFlow(root, flow,
          delivered ? undefined : 'Offline: submission queued locally.');
      })
      .catch((error) => {
        if (error instanceof AuthError) {
          root.textContent = '';
          root.appendChild(renderLogin(root, describeError(error)));
        } else {
          renderFlow(root, flow, describeError(error));
        }
      });
  });
  card.appendChild(submit);
  root.appendChild(card);
}

function renderRankingList(state: TaskState, rerender: () => void): HTMLElement {
  const task = state.task;
  const byLabel = new Map((task.candidates ?? []).map((c) => [c.label, c.text]));
  const container = el('ol', 'ranking-list');
  state.currentOrder().forEach((label, index) => {
    const item = el('li', 'candidate');
    item.draggable = true;
    item.dataset.label = label;

    item.addEventListener('dragstart', (event) => {
      event.dataTransfer?.setData('text/plain', label);
    });
    item.addEventListener('dragover', (event) => event.preventDefault());
    item.addEventListener('drop', (event) => {
      event.preventDefault();
      const dragged = event.dataTransfer?.getData('text/plain');
      if (dragged && dragged !== label) {
        state.moveTo(dragged, index);
        rerender();
      }
    });

    const handle = el('span', 'handle', `#${index + 1}`);
    const body = el('div', 'candidate-body');
    body.appendChild(el('span', 'candidate-label', `Response ${label}`));
    body.appendChild(el('p', 'candidate-text', byLabel.get(label) ?? ''));
    const controls = el('span', 'controls');
    const up = el('button', 'move up', '↑');
    up.disabled = index === 0;
    up.addEventListener('click', () => {
      state.moveUp(label);
      rerender();
    });
    const down = el('button', 'move down', '↓');
    down.disabled = index === state.currentOrder().length - 1;
    down.addEventListener('click', () => {
      state.moveDown(label);
      rerender();
    });
    controls.append(up, down);

    item.append(handle, body, controls);
    container.appendChild(item);
  });
  return container;
}
