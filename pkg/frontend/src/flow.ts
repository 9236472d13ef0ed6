import { ReviewApiClient } from './api';
import { TaskState } from './ordering';
import { SubmissionQueue } from './queue';
import type { TaskKind } from './types';

export type FlowStatus = 'idle' | 'working' | 'done';

/**
 * The annotation session state machine the UI renders: fetch a task, let
 * the annotator reorder/judge it, submit, advance.  Kept free of DOM so
 * it can be driven headlessly.
 */
export class TaskFlow {
  private state: TaskState | null = null;
  private status: FlowStatus = 'idle';

  constructor(
    private readonly client: ReviewApiClient,
    readonly annotator: string,
    readonly kind: TaskKind,
    private readonly queue: SubmissionQueue = new SubmissionQueue(),
  ) {}

  current(): TaskState | null {
    return this.state;
  }

  flowStatus(): FlowStatus {
    return this.status;
  }

  /** Fetch the next task; resolves to null (and status 'done') when exhausted. */
  async advance(): Promise<TaskState | null> {
    const task = await this.client.nextTask(this.annotator, this.kind);
    if (task === null) {
      this.state = null;
      this.status = 'done';
      return null;
    }
    this.state = new TaskState(task);
    this.status = 'working';
    return this.state;
  }

  /**
   * Submit the current task exactly as ordered on screen, then advance.
   * Returns false when the submission had to be queued offline (the flow
   * still advances so the annotator can keep working).
   */
  async submitCurrent(): Promise<boolean> {
    if (this.state === null || !this.state.isComplete()) {
      throw new Error('nothing complete to submit');
    }
    const submission = this.state.toSubmission(this.annotator);
    const delivered = await this.queue.submitOrQueue(this.client, submission);
    await this.advance();
    return delivered;
  }

  /** Retry anything queued while offline. */
  async flushQueue(): Promise<number> {
    return this.queue.flush(this.client);
  }

  pendingCount(): number {
    return this.queue.pending().length;
  }
}
