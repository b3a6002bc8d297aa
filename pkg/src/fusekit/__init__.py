"""fusekit: a parallel treebank engine with constituent trees, a binding
layer, predicate-argument structures and a tagged alignment layer."""
from .align import (ArgAlignment, PredicateAlignment, SentencePair,
                    dangling_report, parse_aln, serialize_aln,
                    validate_alignment)
from .analysis import (build_graph, derive_clusters, find_by_align_tag, frames,
                       realisations, stats)
from .annot import (Argument, Binding, PredArgStructure, PredicateEntry,
                    parse_paa, resolve_binding, role_inventory, serialize_paa,
                    validate_annotation)
from .diagnostics import Diagnostic
from .errors import (DanglingReferenceError, EmptySpanError, FuseError,
                     IngestError, InvariantError, LoadError, ParseError,
                     UnknownNodeError, ValidationFailed)
from .store import (ParallelSet, TreebankStore, ingest_pairs, load_manifest,
                    load_set, save_set)
from .tree import (OriginRef, Ref, SentenceTree, dominates, nt, parse_treebank,
                   serialize_treebank, tok, yield_of)
from .vocab import Vocab

__version__ = '0.1.0'
