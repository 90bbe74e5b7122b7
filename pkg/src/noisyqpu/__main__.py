import sys

from noisyqpu.cli.main import main

sys.exit(main())
