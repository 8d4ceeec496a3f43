/** Microphone capture via the Web Speech recognition API.
 *
 * The API is vendor-prefixed and absent in many environments, so this
 * module only ever *adds* voice input: `createRecognizer` returns null
 * when unsupported and the app keeps working through the text box.
 */

export interface RecognizerCallbacks {
  onPartial: (text: string) => void;
  onFinal: (text: string, confidence: number | null) => void;
  onEnd?: () => void;
}

export interface Recognizer {
  start(): void;
  stop(): void;
}

interface RecognitionResultLike {
  isFinal: boolean;
  0: { transcript: string; confidence?: number };
  length: number;
}

interface RecognitionEventLike {
  resultIndex: number;
  results: ArrayLike<RecognitionResultLike>;
}

interface RecognitionLike {
  continuous: boolean;
  interimResults: boolean;
  lang: string;
  onresult: ((event: RecognitionEventLike) => void) | null;
  onend: (() => void) | null;
  start(): void;
  stop(): void;
}

export function createRecognizer(
  callbacks: RecognizerCallbacks,
): Recognizer | null {
  const holder = globalThis as {
    SpeechRecognition?: new () => RecognitionLike;
    webkitSpeechRecognition?: new () => RecognitionLike;
  };
  const Recognition = holder.SpeechRecognition || holder.webkitSpeechRecognition;
  if (!Recognition) {
    return null;
  }

  const recognition = new Recognition();
  recognition.continuous = true;
  recognition.interimResults = true;
  recognition.lang = "en-US";

  recognition.onresult = (event) => {
    for (let i = event.resultIndex; i < event.results.length; i += 1) {
      const result = event.results[i];
      if (!result) {
        continue;
      }
      const transcript = result[0].transcript.trim();
      if (!transcript) {
        continue;
      }
      if (result.isFinal) {
        callbacks.onFinal(transcript, result[0].confidence ?? null);
      } else {
        callbacks.onPartial(transcript);
      }
    }
  };
  recognition.onend = () => {
    callbacks.onEnd?.();
  };

  return {
    start: () => recognition.start(),
    stop: () => recognition.stop(),
  };
}
