import type { ReviewTask, Submission, Verdict } from './types';

/**
 * Local state for one served task: the working order of candidate labels
 * (for ranking tasks) or the verdict draft (for verification tasks).
 *
 * Every mutation is a pure reorder, so the working order is a permutation
 * of the served labels at all times; `toSubmission` refuses to produce a
 * payload otherwise.
 */
export class TaskState {
  readonly task: ReviewTask;
  private order: string[];
  private verdict: Verdict | null = null;

  constructor(task: ReviewTask) {
    this.task = task;
    this.order = (task.candidates ?? []).map((c) => c.label);
  }

  /** Current on-screen order, best first. */
  currentOrder(): string[] {
    return [...this.order];
  }

  verdictDraft(): Verdict | null {
    return this.verdict;
  }

  /** Move a label one position toward the top. */
  moveUp(label: string): void {
    const i = this.order.indexOf(label);
    if (i > 0) {
      [this.order[i - 1], this.order[i]] = [this.order[i], this.order[i - 1]];
    }
  }

  /** Move a label one position toward the bottom. */
  moveDown(label: string): void {
    const i = this.order.indexOf(label);
    if (i >= 0 && i < this.order.length - 1) {
      [this.order[i], this.order[i + 1]] = [this.order[i + 1], this.order[i]];
    }
  }

  /** Drag-and-drop: place `label` at `index`, shifting the rest. */
  moveTo(label: string, index: number): void {
    const from = this.order.indexOf(label);
    if (from < 0) return;
    const clamped = Math.max(0, Math.min(index, this.order.length - 1));
    this.order.splice(from, 1);
    this.order.splice(clamped, 0, label);
  }

  setVerdict(verdict: Verdict): void {
    this.verdict = verdict;
  }

  /** True once the task can be submitted. */
  isComplete(): boolean {
    if (this.task.kind === 'verification') return this.verdict !== null;
    return this.isPermutationOfServed();
  }

  private isPermutationOfServed(): boolean {
    const served = (this.task.candidates ?? []).map((c) => c.label);
    if (this.order.length !== served.length) return false;
    const seen = new Set(this.order);
    return seen.size === this.order.length && served.every((l) => seen.has(l));
  }

  /**
   * Build the submission payload.  The ranking sent is exactly the
   * on-screen order, nothing re-derived.
   */
  toSubmission(annotator: string): Submission {
    if (!this.isComplete()) {
      throw new Error('task is not complete');
    }
    if (this.task.kind === 'verification') {
      return {
        case_id: this.task.case_id,
        annotator,
        kind: 'verification',
        verdict: this.verdict as Verdict,
      };
    }
    return {
      case_id: this.task.case_id,
      annotator,
      kind: 'ranking',
      ranking: this.currentOrder(),
    };
  }
}
