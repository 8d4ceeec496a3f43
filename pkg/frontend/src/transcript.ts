/** Transcript ticker: turns spoken (or typed) text into numbered events
 * and keeps the display model of what has been heard so far.
 *
 * Partial results overwrite the live line; a final result commits it.
 * Sequence numbers increase across the whole session, partials included,
 * which is exactly what the server's ordering check expects.
 */

import { TranscriptEvent } from "./types.js";

export interface TickerLine {
  text: string;
  final: boolean;
}

export class TranscriptTicker {
  private nextSeq = 1;
  private committed: string[] = [];
  private live: string | null = null;

  /** Record an interim recognition result. */
  partial(text: string): TranscriptEvent {
    this.live = text;
    return { seq: this.nextSeq++, text, is_final: false };
  }

  /** Commit a final recognition result (clears the live line). */
  final(text: string, wordConfidences?: number[]): TranscriptEvent {
    this.live = null;
    this.committed.push(text);
    const event: TranscriptEvent = {
      seq: this.nextSeq++,
      text,
      is_final: true,
    };
    if (wordConfidences !== undefined) {
      event.word_confidences = wordConfidences;
    }
    return event;
  }

  /** Lines to display: committed history plus the live partial, if any. */
  lines(): TickerLine[] {
    const result: TickerLine[] = this.committed.map((text) => ({
      text,
      final: true,
    }));
    if (this.live !== null) {
      result.push({ text: this.live, final: false });
    }
    return result;
  }

  get lastSeq(): number {
    return this.nextSeq - 1;
  }
}
