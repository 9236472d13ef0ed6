import { NetworkError, ReviewApiClient } from './api';
import type { Submission } from './types';

export interface QueueStorage {
  load(): Submission[];
  save(items: Submission[]): void;
}

export class MemoryStorage implements QueueStorage {
  private items: Submission[] = [];
  load(): Submission[] {
    return [...this.items];
  }
  save(items: Submission[]): void {
    this.items = [...items];
  }
}

/** Persist queued submissions across page reloads. */
export class BrowserStorage implements QueueStorage {
  constructor(private readonly key = 'medcorpus-review-queue') {}
  load(): Submission[] {
    const raw = window.localStorage.getItem(this.key);
    return raw ? (JSON.parse(raw) as Submission[]) : [];
  }
  save(items: Submission[]): void {
    window.localStorage.setItem(this.key, JSON.stringify(items));
  }
}

/**
 * Submissions that failed with a transport error wait here and are
 * retried in order on the next flush (e.g. when connectivity returns).
 * Server-side rejections (validation, duplicates) are NOT queued; they
 * propagate to the caller, which surfaces the server's message.
 */
export class SubmissionQueue {
  constructor(private readonly storage: QueueStorage = new MemoryStorage()) {}

  pending(): Submission[] {
    return this.storage.load();
  }

  /**
   * Try to submit; on network failure the submission is queued and
   * `false` is returned.  Returns `true` when it reached the server.
   */
  async submitOrQueue(client: ReviewApiClient, submission: Submission): Promise<boolean> {
    try {
      await client.submit(submission);
      return true;
    } catch (error) {
      if (error instanceof NetworkError) {
        this.storage.save([...this.storage.load(), submission]);
        return false;
      }
      throw error;
    }
  }

  /** Retry queued submissions in order; stops at the first network failure. */
  async flush(client: ReviewApiClient): Promise<number> {
    const items = this.storage.load();
    let sent = 0;
    while (sent < items.length) {
      try {
        await client.submit(items[sent]);
        sent += 1;
      } catch (error) {
        if (error instanceof NetworkError) break;
        // rejected by the server: drop it rather than retry forever
        items.splice(sent, 1);
        this.storage.save(items);
        throw error;
      }
    }
    this.storage.save(items.slice(sent));
    return sent;
  }
}
