"""medcorpus: corpus filtering, chunking, evaluation metrics, and
rating-correlation tooling for multilingual medical text."""

from .errors import (ConfigError, DataFormatError, LexiconError,
                     LlmClientError, MedcorpusError)
from .filtering import (DocumentClassifier, FilterVerdict, MatchConfig,
                        SegmentationMode, classify, compute_dens, compute_mkc,
                        load_match_configs, match_keywords, segment)
from .lexicon import (Lexicon, ValidationReport, load_lexicon,
                      load_lexicon_dir, normalize_term, normalize_text,
                      validate_lexicon)
from .metrics import (IdfTable, TokenizedPair, bleu, bleu_n, choice_accuracy,
                      compute_idf, embed_score, parse_answer, rouge_l, rouge_n)
from .ocr import TextBox, exclude_pages, parse_page_ranges, reading_order
from .pipeline import (CorpusRecord, FilterStats, TextChunk, chunk_document,
                       default_tokenize, filter_stream, get_tokenizer,
                       sample_for_review, tokenize)
from .ratings import (RankingRecord, ScoreMatrix, aggregate_ratings,
                      correlate_metrics, kendall_tau, metric_ranking,
                      ranks_to_scores)
from .bench import (QAItem, SplitSpec, TopicList, build_prompt, classify_topic,
                    dataset_stats, default_topic_list, generate_rationale,
                    split_dataset)
from .llm import HttpLlmClient, LlmClient, StubLlmClient

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
