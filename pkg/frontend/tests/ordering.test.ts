import { describe, expect, it } from 'vitest';

import { TaskState } from '../src/ordering';
import type { ReviewTask } from '../src/types';

function rankingTask(labels = ['A', 'B', 'C', 'D', 'E', 'F']): ReviewTask {
  return {
    case_id: 'case0',
    kind: 'ranking',
    lang: 'en',
    question: 'Q?',
    options: { A: 'yes', B: 'no' },
    answers: ['A'],
    reference_rationale: 'because',
    candidates: labels.map((label) => ({ label, text: `text ${label}` })),
  };
}

function verificationTask(): ReviewTask {
  return { ...rankingTask(), kind: 'verification', candidates: undefined };
}

describe('TaskState ranking', () => {
  it('starts in served order and is already a permutation', () => {
    const state = new TaskState(rankingTask());
    expect(state.currentOrder()).toEqual(['A', 'B', 'C', 'D', 'E', 'F']);
    expect(state.isComplete()).toBe(true);
  });

  it('moveUp and moveDown swap neighbours and stop at the edges', () => {
    const state = new TaskState(rankingTask(['A', 'B', 'C']));
    state.moveUp('A');
    expect(state.currentOrder()).toEqual(['A', 'B', 'C']);
    state.moveUp('C');
    expect(state.currentOrder()).toEqual(['A', 'C', 'B']);
    state.moveDown('B');
    expect(state.currentOrder()).toEqual(['A', 'C', 'B']);
    state.moveDown('A');
    expect(state.currentOrder()).toEqual(['C', 'A', 'B']);
  });

  it('moveTo clamps and preserves the permutation', () => {
    const state = new TaskState(rankingTask(['A', 'B', 'C', 'D']));
    state.moveTo('D', 0);
    expect(state.currentOrder()).toEqual(['D', 'A', 'B', 'C']);
    state.moveTo('A', 99);
    expect(state.currentOrder()).toEqual(['D', 'B', 'C', 'A']);
    state.moveTo('missing', 1);
    expect(state.currentOrder()).toEqual(['D', 'B', 'C', 'A']);
    expect([...state.currentOrder()].sort()).toEqual(['A', 'B', 'C', 'D']);
  });

  it('stays a permutation under arbitrary move sequences', () => {
    const labels = ['A', 'B', 'C', 'D', 'E', 'F'];
    const state = new TaskState(rankingTask(labels));
    let seed = 12345;
    const rand = (n: number) => {
      seed = (seed * 1103515245 + 12345) % 2 ** 31;
      return seed % n;
    };
    for (let i = 0; i < 500; i++) {
      const label = labels[rand(labels.length)];
      const op = rand(3);
      if (op === 0) state.moveUp(label);
      else if (op === 1) state.moveDown(label);
      else state.moveTo(label, rand(labels.length));
      expect([...state.currentOrder()].sort()).toEqual(labels);
      expect(state.isComplete()).toBe(true);
    }
  });

  it('submission payload is exactly the on-screen order', () => {
    const state = new TaskState(rankingTask(['A', 'B', 'C']));
    state.moveTo('C', 0);
    const submission = state.toSubmission('ann1');
    expect(submission).toEqual({
      case_id: 'case0',
      annotator: 'ann1',
      kind: 'ranking',
      ranking: ['C', 'A', 'B'],
    });
  });
});

describe('TaskState verification', () => {
  it('is incomplete until a verdict is chosen', () => {
    const state = new TaskState(verificationTask());
    expect(state.isComplete()).toBe(false);
    expect(() => state.toSubmission('ann1')).toThrow();
    state.setVerdict('qualified');
    expect(state.isComplete()).toBe(true);
    expect(state.toSubmission('ann1')).toEqual({
      case_id: 'case0',
      annotator: 'ann1',
      kind: 'verification',
      verdict: 'qualified',
    });
  });
});
