/** Spoken replies via the Web Speech synthesis API, with a text-only
 * fallback when the API is missing (headless browsers, tests, kiosks
 * without voices). The caption callback always fires, so the reply is
 * never lost even when it cannot be voiced.
 */

export type CaptionSink = (text: string) => void;

interface SynthesisLike {
  cancel(): void;
  speak(utterance: unknown): void;
}

function ambientSynthesis(): SynthesisLike | null {
  const holder = globalThis as {
    speechSynthesis?: SynthesisLike;
    SpeechSynthesisUtterance?: new (text: string) => unknown;
  };
  if (!holder.speechSynthesis || !holder.SpeechSynthesisUtterance) {
    return null;
  }
  return holder.speechSynthesis;
}

export class Speaker {
  private readonly caption: CaptionSink;
  readonly voiced: boolean;

  constructor(caption: CaptionSink) {
    this.caption = caption;
    this.voiced = ambientSynthesis() !== null;
  }

  /** Caption the text, and voice it when synthesis is available. */
  say(text: string): void {
    this.caption(text);
    const synth = ambientSynthesis();
    if (!synth) {
      return;
    }
    try {
      const holder = globalThis as {
        SpeechSynthesisUtterance?: new (text: string) => unknown;
      };
      synth.cancel();
      synth.speak(new holder.SpeechSynthesisUtterance!(text));
    } catch {
      // voicing is an enhancement; the caption already happened
    }
  }
}
