import sys

from hbvm_fdepca.cli import main

sys.exit(main())
